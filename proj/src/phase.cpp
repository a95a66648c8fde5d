#include "graze/phase.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "graze/error.hpp"

namespace graze {

namespace {

Vec random_in_ball(std::mt19937_64& rng, int d, double radius) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vec v(d);
    for (int i = 0; i < d; ++i) v(i) = normal(rng);
    return v.normalized() * (radius * std::pow(unif(rng), 1.0 / d));
}

}  // namespace

IncomingPhase IncomingPhase::plane(const Vec& theta) {
    if (theta.size() < 2) throw Error(ErrorCode::InvalidArgument, "plane phase needs n >= 2");
    if (std::abs(theta.norm() - 1.0) > 1e-12) throw Error(ErrorCode::InvalidArgument, "theta must be a unit vector");
    return IncomingPhase(PlanePhase{theta}, static_cast<int>(theta.size()));
}

IncomingPhase IncomingPhase::spherical(const Vec& b) {
    if (b.size() < 2) throw Error(ErrorCode::InvalidArgument, "spherical phase needs n >= 2");
    return IncomingPhase(SphericalPhase{b}, static_cast<int>(b.size()));
}

IncomingPhase IncomingPhase::general(int dim, std::function<double(const Vec&)> value,
                                     std::function<Vec(const Vec&)> gradient, std::string name) {
    if (!value || !gradient) throw Error(ErrorCode::InvalidArgument, "general phase needs value and gradient");
    return IncomingPhase(GeneralConvexPhase{std::move(value), std::move(gradient), std::move(name)}, dim);
}

IncomingPhase IncomingPhase::convex_distance(const Vec& center, double radius) {
    if (!(radius >= 0.0)) throw Error(ErrorCode::InvalidArgument, "sphere radius must be nonnegative");
    return general(
        static_cast<int>(center.size()), [center, radius](const Vec& x) { return (x - center).norm() - radius; },
        [center](const Vec& x) -> Vec {
            const Vec d = x - center;
            const double r = d.norm();
            if (r == 0.0) throw Error(ErrorCode::SourceOnBoundary, "distance phase evaluated at the sphere centre");
            return d / r;
        },
        "convex-distance");
}

std::string IncomingPhase::describe() const {
    std::ostringstream os;
    auto vec = [&](const Vec& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? " " : "") << v(i);
    };
    if (const auto* p = as_plane()) {
        os << "plane theta=(";
        vec(p->theta);
        os << ")";
    } else if (const auto* s = as_spherical()) {
        os << "spherical b=(";
        vec(s->b);
        os << ")";
    } else {
        os << "general " << as_general()->name;
    }
    return os.str();
}

double IncomingPhase::psi(const Vec& x) const {
    if (const auto* p = as_plane()) return p->theta.dot(x);
    if (const auto* s = as_spherical()) return (x - s->b).norm();
    return as_general()->value(x);
}

Vec IncomingPhase::grad(const Vec& x) const {
    if (const auto* p = as_plane()) return p->theta;
    if (const auto* s = as_spherical()) {
        const Vec d = x - s->b;
        const double r = d.norm();
        if (r == 0.0) throw Error(ErrorCode::SourceOnBoundary, "spherical phase evaluated at its source");
        return d / r;
    }
    return as_general()->gradient(x);
}

Mat IncomingPhase::hess(const Vec& x) const {
    const int n = dim_;
    if (as_plane()) return Mat::Zero(n, n);
    if (const auto* s = as_spherical()) {
        const Vec d = x - s->b;
        const double r = d.norm();
        if (r == 0.0) throw Error(ErrorCode::SourceOnBoundary, "spherical phase evaluated at its source");
        const Vec a = d / r;
        return (Mat::Identity(n, n) - a * a.transpose()) / r;
    }
    const auto& g = as_general()->gradient;
    const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, x.norm());
    Mat m(n, n);
    for (int j = 0; j < n; ++j) {
        Vec xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        m.col(j) = (g(xp) - g(xm)) / (2.0 * h);
    }
    return m;
}

Vec BoundaryCovector::full() const {
    Vec v(xibar.size() + 1);
    v(0) = xi1;
    v.tail(xibar.size()) = xibar;
    return v;
}

BoundaryCovector BoundaryCovector::from_full(const Vec& xbar, const Vec& xi) {
    return {xbar, xi(0), xi.tail(xi.size() - 1)};
}

Vec boundary_point(const Obstacle& obstacle, const Vec& xbar) {
    Vec p(xbar.size() + 1);
    p(0) = obstacle.eval(xbar);
    p.tail(xbar.size()) = xbar;
    return p;
}

namespace {

void check_dims(const IncomingPhase& phase, const Obstacle& obstacle) {
    if (phase.dim() != obstacle.dim())
        throw Error(ErrorCode::InvalidArgument, "phase dimension " + std::to_string(phase.dim()) +
                                                    " does not match obstacle dimension " +
                                                    std::to_string(obstacle.dim()));
}

}  // namespace

BoundaryCovector xi_incoming(const IncomingPhase& phase, const Obstacle& obstacle, const Vec& xbar) {
    check_dims(phase, obstacle);
    return BoundaryCovector::from_full(xbar, phase.grad(boundary_point(obstacle, xbar)));
}

Mat xi_incoming_jacobian(const IncomingPhase& phase, const Obstacle& obstacle, const Vec& xbar) {
    check_dims(phase, obstacle);
    const int d = obstacle.tangential_dim();
    Mat lift(d + 1, d);
    lift.row(0) = obstacle.grad(xbar).transpose();
    lift.bottomRows(d) = Mat::Identity(d, d);
    return phase.hess(boundary_point(obstacle, xbar)) * lift;
}

double eikonal_residual(const IncomingPhase& phase, const std::vector<Vec>& points) {
    double worst = 0.0;
    for (const auto& x : points) worst = std::max(worst, std::abs(phase.grad(x).squaredNorm() - 1.0));
    return worst;
}

ConvexityVerdict convexity_check(const IncomingPhase& phase, const std::vector<std::pair<Vec, Vec>>& pairs,
                                 double tol) {
    ConvexityVerdict v;
    v.worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& [z1, z2] : pairs) {
        const double margin = phase.psi(z2) - phase.psi(z1) - phase.grad(z1).dot(z2 - z1);
        if (margin < v.worst_margin) {
            v.worst_margin = margin;
            v.worst_z1 = z1;
            v.worst_z2 = z2;
        }
        ++v.pairs_checked;
    }
    if (pairs.empty()) v.worst_margin = 0.0;
    v.pass = v.worst_margin >= -tol;
    return v;
}

double boundary_trace(const IncomingPhase& phase, const Obstacle& obstacle, const Vec& xbar) {
    check_dims(phase, obstacle);
    return phase.psi(boundary_point(obstacle, xbar));
}

Vec boundary_trace_gradient(const IncomingPhase& phase, const Obstacle& obstacle, const Vec& xbar) {
    const BoundaryCovector xi = xi_incoming(phase, obstacle, xbar);
    return xi.xi1 * obstacle.grad(xbar) + xi.xibar;
}

Mat boundary_trace_hessian(const IncomingPhase& phase, const Obstacle& obstacle, const Vec& xbar) {
    check_dims(phase, obstacle);
    const int d = obstacle.tangential_dim();
    Mat lift(d + 1, d);
    lift.row(0) = obstacle.grad(xbar).transpose();
    lift.bottomRows(d) = Mat::Identity(d, d);
    const Vec p = boundary_point(obstacle, xbar);
    const double xi1 = phase.grad(p)(0);
    Mat h = lift.transpose() * phase.hess(p) * lift + xi1 * obstacle.hess(xbar);
    return 0.5 * (h + h.transpose());
}

PhaseValidation validate_phase(const IncomingPhase& phase, const Obstacle& obstacle, double radius, int points,
                               int pairs, unsigned long long seed) {
    check_dims(phase, obstacle);
    PhaseValidation out;
    std::mt19937_64 rng(seed);
    const int d = obstacle.tangential_dim();
    if (const auto* s = phase.as_spherical()) {
        const Vec bbar = s->b.tail(d);
        if (obstacle.contains(bbar) && s->b(0) <= obstacle.eval(bbar)) {
            out.pass = false;
            out.problems.push_back("source lies in the closure of the obstacle");
        }
    }
    std::vector<Vec> samples;
    for (int i = 0; i < points; ++i) samples.push_back(boundary_point(obstacle, random_in_ball(rng, d, radius)));
    out.eikonal = eikonal_residual(phase, samples);
    if (out.eikonal > 1e-9) {
        out.pass = false;
        out.problems.push_back("eikonal residual " + std::to_string(out.eikonal) + " exceeds 1e-9");
    }
    if (!phase.as_plane() && !samples.empty()) {
        std::vector<std::pair<Vec, Vec>> pz;
        std::uniform_int_distribution<size_t> pick(0, samples.size() - 1);
        for (int i = 0; i < pairs; ++i) pz.emplace_back(samples[pick(rng)], samples[pick(rng)]);
        out.convexity = convexity_check(phase, pz);
        if (!out.convexity.pass) {
            out.pass = false;
            out.problems.push_back("convexity inequality violated");
        }
    }
    return out;
}

}  // namespace graze
