#pragma once

#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "graze/linalg.hpp"
#include "graze/obstacle.hpp"

namespace graze {

struct PlanePhase {
    Vec theta;  // full unit vector in R^n
};

struct SphericalPhase {
    Vec b;  // source point in R^n
};

// Value + gradient provider for psi. Hessians are obtained by differencing the
// gradient. Providers must be safe to call concurrently.
struct GeneralConvexPhase {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;
    std::string name;
};

// Incoming phase phi_i(x, t) = -t + psi(x).
class IncomingPhase {
public:
    using Variant = std::variant<PlanePhase, SphericalPhase, GeneralConvexPhase>;

    static IncomingPhase plane(const Vec& theta);
    static IncomingPhase spherical(const Vec& b);
    static IncomingPhase general(int dim, std::function<double(const Vec&)> value,
                                 std::function<Vec(const Vec&)> gradient, std::string name);
    // psi(x) = |x - center| - radius, the distance to a sphere from outside it.
    static IncomingPhase convex_distance(const Vec& center, double radius);

    int dim() const { return dim_; }
    const Variant& variant() const { return v_; }
    const PlanePhase* as_plane() const { return std::get_if<PlanePhase>(&v_); }
    const SphericalPhase* as_spherical() const { return std::get_if<SphericalPhase>(&v_); }
    const GeneralConvexPhase* as_general() const { return std::get_if<GeneralConvexPhase>(&v_); }
    std::string describe() const;

    double psi(const Vec& x) const;
    Vec grad(const Vec& x) const;
    Mat hess(const Vec& x) const;

private:
    IncomingPhase(Variant v, int dim) : v_(std::move(v)), dim_(dim) {}
    Variant v_;
    int dim_;
};

struct BoundaryCovector {
    Vec xbar;
    double xi1 = 0.0;
    Vec xibar;

    Vec full() const;
    static BoundaryCovector from_full(const Vec& xbar, const Vec& xi);
};

// Boundary point (F(xbar), xbar) as a vector in R^n.
Vec boundary_point(const Obstacle& obstacle, const Vec& xbar);

BoundaryCovector xi_incoming(const IncomingPhase& phase, const Obstacle& obstacle, const Vec& xbar);

// d xi^i / d xbar, an n x (n-1) matrix: hess psi * [grad F^T ; I].
Mat xi_incoming_jacobian(const IncomingPhase& phase, const Obstacle& obstacle, const Vec& xbar);

double eikonal_residual(const IncomingPhase& phase, const std::vector<Vec>& points);

struct ConvexityVerdict {
    bool pass = true;
    double worst_margin = 0.0;
    Vec worst_z1;
    Vec worst_z2;
    size_t pairs_checked = 0;
};

// Checks psi(z2) - psi(z1) >= <grad psi(z1), z2 - z1> - tol on every pair.
ConvexityVerdict convexity_check(const IncomingPhase& phase, const std::vector<std::pair<Vec, Vec>>& pairs,
                                 double tol = 1e-10);

// Psi(xbar) = psi(F(xbar), xbar) and its derivatives.
double boundary_trace(const IncomingPhase& phase, const Obstacle& obstacle, const Vec& xbar);
Vec boundary_trace_gradient(const IncomingPhase& phase, const Obstacle& obstacle, const Vec& xbar);
Mat boundary_trace_hessian(const IncomingPhase& phase, const Obstacle& obstacle, const Vec& xbar);

struct PhaseValidation {
    bool pass = true;
    double eikonal = 0.0;
    ConvexityVerdict convexity;
    std::vector<std::string> problems;
};

// Opt-in validation on random boundary points and pairs in the ball of the
// given radius around the apex (defaults: 10^3 points, 10^4 pairs).
PhaseValidation validate_phase(const IncomingPhase& phase, const Obstacle& obstacle, double radius,
                               int points = 1000, int pairs = 10000, unsigned long long seed = 42);

}  // namespace graze
