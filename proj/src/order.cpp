#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "graze/error.hpp"
#include "graze/grazing.hpp"

namespace graze {

std::string OrderClassification::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Even: os << order << (diffractive ? " diffractive" : " gliding"); break;
        case Kind::Odd: os << order << " inflection"; break;
        case Kind::AtLeast: os << ">=" << order; break;
    }
    return os.str();
}

OrderClassification classify_order_along(const Obstacle& obstacle, const Vec& direction) {
    const double n = direction.norm();
    if (n == 0.0) throw Error(ErrorCode::ZeroVector, "apex direction vanishes");
    OrderClassification out;
    out.direction = direction / n;
    out.taylor = obstacle.directional_taylor(out.direction, kMaxTaylorOrder);
    double scale = 1.0;
    for (double c : out.taylor) scale = std::max(scale, std::abs(c));
    const double zero_tol = 1e-9 * scale;
    for (int j = 2; j <= kMaxTaylorOrder; ++j) {
        const double c = out.taylor[static_cast<size_t>(j) - 1];
        if (std::abs(c) <= zero_tol) continue;
        out.order = j;
        if (j % 2 == 1) {
            out.kind = OrderClassification::Kind::Odd;
        } else {
            out.kind = OrderClassification::Kind::Even;
            out.diffractive = c < 0.0;
            out.gliding = c > 0.0;
        }
        return out;
    }
    out.kind = OrderClassification::Kind::AtLeast;
    out.order = kMaxTaylorOrder;
    return out;
}

OrderClassification classify_order(const Obstacle& obstacle, const IncomingPhase& phase, double normalization_tol) {
    const BoundaryCovector xi = xi_incoming(phase, obstacle, Vec::Zero(obstacle.tangential_dim()));
    if (std::abs(xi.xi1) > normalization_tol) {
        std::ostringstream msg;
        msg << "xi1 at the apex is " << xi.xi1 << ", expected 0";
        throw Error(ErrorCode::NotNormalized, msg.str());
    }
    return classify_order_along(obstacle, xi.xibar);
}

U1wwVerdict check_u1ww(const Polynomial& g, int angle_samples, double pd_tol) {
    if (g.is_zero() || !g.is_homogeneous() || g.degree() % 2 != 0)
        throw Error(ErrorCode::NotHomogeneous, "expected a nonzero homogeneous polynomial of even degree");
    const int d = g.nvars();
    std::vector<Vec> dirs;
    if (d == 1) {
        dirs = {Vec::Constant(1, 1.0), Vec::Constant(1, -1.0)};
    } else if (d == 2) {
        for (int k = 0; k < angle_samples; ++k) {
            const double th = 2.0 * M_PI * k / angle_samples;
            Vec v(2);
            v << std::cos(th), std::sin(th);
            dirs.push_back(v);
        }
    } else {
        std::mt19937_64 rng(2024);
        std::normal_distribution<double> normal;
        for (int k = 0; k < angle_samples; ++k) {
            Vec v(d);
            for (int i = 0; i < d; ++i) v(i) = normal(rng);
            dirs.push_back(v.normalized());
        }
    }
    U1wwVerdict out;
    out.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (const Vec& x : dirs) {
        const double lam = min_symmetric_eigenvalue(g.hessian(x));
        if (lam < out.min_eigenvalue) {
            out.min_eigenvalue = lam;
            out.argmin = x;
        }
    }
    out.samples = static_cast<int>(dirs.size());
    out.pass = out.min_eigenvalue > pd_tol;
    return out;
}

}  // namespace graze
