#pragma once

#include <optional>
#include <string>
#include <vector>

#include "graze/linalg.hpp"
#include "graze/obstacle.hpp"
#include "graze/phase.hpp"
#include "graze/polynomial.hpp"

namespace graze {

// ---------------------------------------------------------------- grazing functions

// Scalar functions of xbar whose zero set near the apex is the projected
// grazing set. All vanish at the apex for normalized inputs.
//   SphericalH:    F - 1 - grad F . (xbar - bbar)
//   PlanarG:       -grad F . thetabar  (= grad G . thetabar when F = 1 - G)
//   SymmetricZeta: -h/h'(s) + 2s - 2 Lambda xbar . Lambda bbar, s = |Lambda xbar|^2
struct GrazingFunction {
    enum class Kind { SphericalH, PlanarG, SymmetricZeta };

    Kind kind = Kind::SphericalH;
    Vec param;  // bbar or thetabar

    static GrazingFunction spherical_h(const Vec& bbar);
    static GrazingFunction planar_g(const Vec& thetabar);
    static GrazingFunction symmetric_zeta(const Vec& bbar);

    // Grazing function matching an apex-normalized phase: spherical sources
    // need b1 = 1, plane waves theta1 = 0. Throws NotNormalized otherwise.
    static GrazingFunction for_phase(const IncomingPhase& phase, const Obstacle& obstacle);

    // Unit tangential direction of the incoming ray at the apex.
    Vec apex_direction() const;
    std::string describe() const;
};

double grazing_residual(const GrazingFunction& gf, const Obstacle& obstacle, const Vec& xbar);
Vec grazing_gradient(const GrazingFunction& gf, const Obstacle& obstacle, const Vec& xbar);

double symmetric_zeta(const Obstacle& obstacle, const Vec& bbar, const Vec& xbar);

// Sign changes of gf on the segment [lo, hi] of a one-variable obstacle, each
// refined by bisection. Exact zeros on the sample grid are skipped.
std::vector<double> scan_sign_changes_1d(const GrazingFunction& gf, const Obstacle& obstacle, double lo, double hi,
                                         int samples = 4001);

// ---------------------------------------------------------------- order

struct OrderClassification {
    enum class Kind { Even, Odd, AtLeast };

    Kind kind = Kind::AtLeast;
    int order = kMaxTaylorOrder;
    bool diffractive = false;
    bool gliding = false;
    std::vector<double> taylor;  // c_1 .. c_Jmax along the apex direction
    Vec direction;

    std::string describe() const;
};

OrderClassification classify_order_along(const Obstacle& obstacle, const Vec& direction);
// Throws NotNormalized when xi1^i(0) is not zero within normalization_tol.
OrderClassification classify_order(const Obstacle& obstacle, const IncomingPhase& phase,
                                   double normalization_tol = 1e-12);

struct U1wwVerdict {
    bool pass = false;
    double min_eigenvalue = 0.0;
    Vec argmin;
    int samples = 0;
};

// Smallest Hessian eigenvalue of a homogeneous even-degree polynomial over the
// unit sphere, sampled at angle_samples points; PASS iff it exceeds pd_tol.
U1wwVerdict check_u1ww(const Polynomial& g, int angle_samples = 3600, double pd_tol = 1e-12);

// ---------------------------------------------------------------- tracing

struct CurveVertex {
    Vec x;
    double arc = 0.0;
    double residual = 0.0;
};

struct GrazingBranch {
    int id = 0;
    int side = 1;  // sign of the transverse coordinate
    std::vector<CurveVertex> vertices;
    bool reached_window = false;
};

struct GrazingCurve {
    std::vector<GrazingBranch> branches;
    Vec along;       // apex incoming direction
    Vec transverse;  // along rotated by +90 degrees
    double window = 0.0;
    double trace_tol = 0.0;
};

struct TraceOptions {
    double v_seed = 1e-3;
    double v_min = 1e-5;
    int ladder_per_decade = 20;
    double h_min = 1e-6;
    double h_max = 1e-2;
    double relative_step = 0.1;  // step cap as a fraction of the distance to the apex
    int max_vertices = 20000;
};

// Two branches of the zero set of gf in the box |x.along|, |x.transverse| <=
// window. Requires two tangential variables. A window of zero returns no branches.
GrazingCurve trace_grazing_curve(const GrazingFunction& gf, const Obstacle& obstacle, double window,
                                 double trace_tol = 1e-10, const TraceOptions& options = {});

// ---------------------------------------------------------------- regularity

struct RegularityEstimate {
    enum class Verdict { Cusp, C1NotC2, Smooth, Inconclusive };

    double exponent = 0.0;
    double coefficient = 0.0;
    double r_squared = 0.0;
    double poly_fit_residual = 0.0;  // relative RMS of the secondary polynomial fit
    bool swapped = false;            // true when the graph is over the along coordinate
    int points = 0;
    Verdict verdict = Verdict::Inconclusive;
};

std::string to_string(RegularityEstimate::Verdict verdict);

// Fits log|u| = p log|v| + c on vertices with |v| in [lo, hi], where u is the
// graph coordinate and v the transverse one.
RegularityEstimate estimate_regularity(const GrazingCurve& curve, double lo = 1e-4, double hi = 1e-2,
                                       int min_points_per_branch = 20);

// ---------------------------------------------------------------- slices

struct SliceResult {
    int count_pos = 0;
    int count_neg = 0;
    std::vector<Vec> points;  // grazing points on the slice, original coordinates
};

// Counts grazing points on the closed curve where the plane through the source
// and (F(x2*, 0), x2*) meets the boundary, after rotating bbar onto the negative
// first axis. Requires x2_star < 0.
SliceResult slice_grazing_count(const Obstacle& obstacle, const Vec& bbar, double x2_star, int samples = 4096);

// ---------------------------------------------------------------- flowout

struct FlowoutLine {
    Vec vertex;
    std::vector<Vec> points;  // (x, t) along the incoming ray, length n + 1 each
};

struct FlowoutSheet {
    std::vector<FlowoutLine> lines;
};

FlowoutLine flowout_line(const Obstacle& obstacle, const IncomingPhase& phase, const Vec& xbar,
                         const std::vector<double>& s_values, double t = 0.0, double grazing_tol = 1e-8);

FlowoutSheet shadow_boundary_flowout(const Obstacle& obstacle, const IncomingPhase& phase, const GrazingCurve& curve,
                                     const std::vector<double>& s_values, double t = 0.0,
                                     double grazing_tol = 1e-8);

// ---------------------------------------------------------------- report

enum class GsVerdict { HoldsSmooth, HoldsC1Evidence, FailsCuspEvidence, Inconclusive };
std::string to_string(GsVerdict verdict);

struct GsOptions {
    double window = 0.1;
    double trace_tol = 1e-10;
    std::vector<double> slice_offsets = {-0.1, -0.05, -0.02, -0.01};
    double scan_half_width = 0.3;  // one tangential variable only
};

struct GsReport {
    std::optional<OrderClassification> order;
    std::optional<U1wwVerdict> u1ww;
    int leading_degree = -1;
    std::optional<RegularityEstimate> regularity;
    std::optional<GrazingCurve> curve;
    std::vector<std::pair<double, SliceResult>> slices;
    int scan_zeros = -1;
    double diffractive_fraction = -1.0;
    double transversality = 0.0;  // -2 xibar^i(0) . grad zeta(0) where available
    GsVerdict verdict = GsVerdict::Inconclusive;
    std::string basis;
    std::vector<std::string> notes;
};

GsReport gs_assumption_report(const Obstacle& obstacle, const IncomingPhase& phase, const GsOptions& options = {});

}  // namespace graze
