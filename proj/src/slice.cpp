#include <cmath>
#include <sstream>

#include "graze/error.hpp"
#include "graze/grazing.hpp"

namespace graze {

SliceResult slice_grazing_count(const Obstacle& obstacle, const Vec& bbar, double x2_star, int samples) {
    if (obstacle.tangential_dim() != 2) throw Error(ErrorCode::InvalidArgument, "slice test needs n = 3");
    if (samples < 8) throw Error(ErrorCode::InvalidArgument, "slice test needs at least 8 angular samples");
    if (!(x2_star < 0.0)) {
        std::ostringstream msg;
        msg << "x2* = " << x2_star << " is not on the lit side (x2* < 0 required)";
        throw Error(ErrorCode::SliceMiss, msg.str());
    }
    const double bn = bbar.norm();
    if (bn == 0.0) throw Error(ErrorCode::ZeroVector, "source offset bbar vanishes");

    const bool aligned = bbar(1) == 0.0 && bbar(0) < 0.0;
    const RotatedObstacle rot = aligned ? RotatedObstacle{obstacle, Mat::Identity(2, 2)} : rotate_coordinates(obstacle, bbar);
    const Obstacle& ob = rot.obstacle;
    const double a = -bn;
    if (x2_star <= a) throw Error(ErrorCode::SliceMiss, "x2* lies beyond the source");
    Vec astar(2);
    astar << x2_star, 0.0;
    const double fstar = ob.eval(astar);
    auto K = [&](const Vec& x) { return (ob.eval(x) - 1.0) * (x2_star - a) + (x(0) - a) * (1.0 - fstar); };

    // The level set {K = 0} is star-shaped about the apex, so each ray has one crossing.
    const double rmax = ob.radius() * (1.0 - 1e-12);
    auto radius_at = [&](double phi) {
        Vec dir(2);
        dir << std::cos(phi), std::sin(phi);
        if (K(dir * rmax) >= 0.0) throw Error(ErrorCode::SliceMiss, "slice curve leaves the obstacle domain");
        double lo = 0.0, hi = rmax;
        for (int k = 0; k < 200; ++k) {
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;
            (K(dir * mid) >= 0.0 ? lo : hi) = mid;
        }
        return Vec(dir * (0.5 * (lo + hi)));
    };
    Vec b2(2);
    b2 << a, 0.0;
    const GrazingFunction gf = GrazingFunction::spherical_h(b2);
    auto H = [&](double phi) { return grazing_residual(gf, ob, radius_at(phi)); };

    SliceResult out;
    std::vector<double> hv(static_cast<size_t>(samples));
    for (int k = 0; k < samples; ++k) hv[static_cast<size_t>(k)] = H(2.0 * M_PI * k / samples);
    for (int k = 0; k < samples; ++k) {
        const double h0 = hv[static_cast<size_t>(k)];
        const double h1 = hv[static_cast<size_t>((k + 1) % samples)];
        if (!(h0 * h1 < 0.0)) continue;
        double lo = 2.0 * M_PI * k / samples;
        double hi = 2.0 * M_PI * (k + 1) / samples;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;
            ((H(mid) < 0.0) == (h0 < 0.0) ? lo : hi) = mid;
        }
        const Vec p = radius_at(0.5 * (lo + hi));
        if (p(1) > 0.0) ++out.count_pos;
        if (p(1) < 0.0) ++out.count_neg;
        out.points.push_back(rot.rotation.transpose() * p);
    }
    return out;
}

}  // namespace graze
