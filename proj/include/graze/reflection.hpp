#pragma once

#include <optional>
#include <string>
#include <vector>

#include "graze/linalg.hpp"
#include "graze/obstacle.hpp"
#include "graze/phase.hpp"

namespace graze {

inline constexpr double kGrazingTol = 1e-10;

enum class PointLabel { Illuminated, Grazing, Shadow };
std::string to_string(PointLabel label);

struct BoundaryClassification {
    Vec xbar;
    double margin = 0.0;  // <grad F, xibar^i> - xi1^i
    PointLabel label = PointLabel::Grazing;
};

PointLabel label_for_margin(double margin, double tol = kGrazingTol);

// Margin <grad F, xibar> - xi1 of a covector at a boundary point with slope grad F.
double reflection_margin(const Vec& grad_f, const BoundaryCovector& xi);

// Mirror image of xi across the tangent plane of the boundary, given grad F.
BoundaryCovector reflect_with_gradient(const Vec& grad_f, const BoundaryCovector& xi);
BoundaryCovector reflect_direction(const Obstacle& obstacle, const Vec& xbar, const BoundaryCovector& xi_i);

BoundaryClassification classify_boundary_point(const Obstacle& obstacle, const IncomingPhase& phase, const Vec& xbar,
                                               double tol = kGrazingTol);

struct FlowSample {
    double s = 0.0;
    Vec xbar;
    double t = 0.0;
    Vec y;  // (y1, ybar, t'), length n + 1
};

FlowSample flow_map(const Obstacle& obstacle, const IncomingPhase& phase, double s, const Vec& xbar, double t,
                    double tol = kGrazingTol);

// Spatial part of the flow map without domain or illumination checks; used by
// difference stencils and the Newton inversion.
Vec flow_space_unchecked(const Obstacle& obstacle, const IncomingPhase& phase, double s, const Vec& xbar);

struct JacobianReport {
    double j_analytic = 0.0;  // 2 mu det(I + 2s B^-1 C B^-T (B^T K + B^T L))
    double j_direct = 0.0;    // 2 xi1^r det(B + 2s C (K + L))
    double j_fd = 0.0;
    double lower_bound = 0.0;  // 2 mu
    double mu = 0.0;
    double xi1_r = 0.0;
    Mat B, C, K, L;
    Mat A;                   // B + 2s C (K + L)
    Mat BtK;                 // grad xibar^i + grad F (x) grad xi1^i, computed without B
    Mat BtL;                 // (xi1^i - xi1^r) hess F
    Mat dxibar_r_fd;         // central differences of the reflected direction
};

// Throws GrazingSingular when |mu| <= tol and ShadowPoint when mu < -tol.
JacobianReport jacobian_analytic(const Obstacle& obstacle, const IncomingPhase& phase, double s, const Vec& xbar,
                                 double tol = kGrazingTol, double fd_step = 1e-5);

// Determinant of the central-difference Jacobian of (s, xbar, t) -> Z_r.
double jacobian_fd(const Obstacle& obstacle, const IncomingPhase& phase, double s, const Vec& xbar, double t,
                   double step = 1e-5, double tol = kGrazingTol);

// d xibar^r / d xbar by central differences of the reflected covector field.
Mat reflected_direction_jacobian_fd(const Obstacle& obstacle, const IncomingPhase& phase, const Vec& xbar,
                                    double step = 1e-5);

struct FlowSeed {
    double s = 0.0;
    Vec xbar;
};

struct InvertOptions {
    double s_max = 1.0;
    double radius = 0.0;  // seed-search radius; 0 uses the obstacle radius
    int grid = 41;
    int max_iterations = 50;
    double tolerance = 1e-10;
    double seed_margin = 1e-4;
};

struct FlowPreimage {
    double s = 0.0;
    Vec xbar;
    double t = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

FlowPreimage invert_flow(const Obstacle& obstacle, const IncomingPhase& phase, const Vec& y,
                         const std::optional<FlowSeed>& seed = std::nullopt, const InvertOptions& options = {});

struct ReflectedPhaseValue {
    double value = 0.0;
    Vec gradient;  // (xi^r, -1)
    FlowPreimage preimage;
};

ReflectedPhaseValue reflected_phase_at(const Obstacle& obstacle, const IncomingPhase& phase, const Vec& y,
                                       const std::optional<FlowSeed>& seed = std::nullopt,
                                       const InvertOptions& options = {});

struct RfmOptions {
    double s0 = 1.0;
    double radius = 0.5;
    int budget = 1000;
    unsigned long long seed = 42;
    double tol = kGrazingTol;
    double fd_step = 1e-5;
    double rel_tol = 1e-6;
    double abs_floor = 1e-9;   // agreement floor for tiny determinants
    double bound_slack = 1e-9;
    int near_pairs = 10000;
    double separation_c = 1e-8;
    double collision_image = 1e-9;
    double collision_domain = 1e-6;
};

struct RfmRow {
    double s = 0.0;
    Vec xbar;
    double t = 0.0;
    double mu = 0.0;
    double j_analytic = 0.0;  // NaN on grazing samples
    double j_fd = 0.0;
    double bound = 0.0;
    bool pass = true;
};

struct RfmVerdict {
    bool pass = true;
    std::vector<RfmRow> rows;
    int illuminated = 0;
    int grazing = 0;
    int bound_failures = 0;
    int agreement_failures = 0;
    int collisions = 0;
    int separation_failures = 0;
    double min_separation_ratio = 0.0;
    double worst_relative_error = 0.0;
    double min_j_minus_bound = 0.0;
    std::vector<RfmRow> worst;  // up to five failing rows, worst first
    std::vector<std::string> failures;
};

RfmVerdict verify_rfm(const Obstacle& obstacle, const IncomingPhase& phase, const RfmOptions& options = {});

}  // namespace graze
