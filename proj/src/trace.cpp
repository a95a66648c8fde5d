#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "graze/error.hpp"
#include "graze/grazing.hpp"

namespace graze {

namespace {

struct Tracer {
    const GrazingFunction& gf;
    const Obstacle& obstacle;
    Vec along;
    Vec transverse;
    double window;
    double trace_tol;
    TraceOptions opt;
    std::vector<double> scan;  // signed geometric grid on the along axis

    Vec point(double a, double w) const { return a * along + w * transverse; }
    double f(const Vec& x) const { return grazing_residual(gf, obstacle, x); }

    bool inside_box(const Vec& x) const {
        return std::abs(x.dot(along)) <= window && std::abs(x.dot(transverse)) <= window;
    }

    void build_scan() {
        const int per_decade = 40;
        const int decades = 13;
        scan.push_back(0.0);
        for (int k = 0; k <= per_decade * decades; ++k) {
            const double a = window * std::pow(10.0, -static_cast<double>(k) / per_decade);
            scan.push_back(a);
            scan.push_back(-a);
        }
        std::sort(scan.begin(), scan.end());
    }

    // Root of a -> f(point(a, w)) closest to a = 0, refined by bisection.
    std::optional<double> root_at(double w) const {
        std::vector<double> vals(scan.size());
        for (size_t i = 0; i < scan.size(); ++i) vals[i] = f(point(scan[i], w));
        std::optional<double> best;
        double best_dist = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < scan.size(); ++i) {
            if (vals[i] == 0.0 && std::abs(scan[i]) < best_dist) {
                best = scan[i];
                best_dist = std::abs(scan[i]);
            }
            if (i + 1 < scan.size() && vals[i] * vals[i + 1] < 0.0) {
                const double dist = std::min(std::abs(scan[i]), std::abs(scan[i + 1]));
                if (dist < best_dist) {
                    double lo = scan[i], hi = scan[i + 1];
                    const double flo = vals[i];
                    for (int k = 0; k < 300; ++k) {
                        const double mid = 0.5 * (lo + hi);
                        if (mid == lo || mid == hi) break;
                        const double fm = f(point(mid, w));
                        if (fm == 0.0) {
                            lo = hi = mid;
                            break;
                        }
                        ((fm < 0.0) == (flo < 0.0) ? lo : hi) = mid;
                    }
                    best = 0.5 * (lo + hi);
                    best_dist = dist;
                }
            }
        }
        return best;
    }

    Vec tangent(const Vec& x, const Vec& prefer) const {
        const Vec g = grazing_gradient(gf, obstacle, x);
        Vec t(2);
        t << -g(1), g(0);
        const double n = t.norm();
        if (n == 0.0) return prefer;
        t /= n;
        return t.dot(prefer) < 0.0 ? Vec(-t) : t;
    }

    // Newton projection onto the zero set along the gradient direction.
    Vec correct(Vec q) const {
        for (int it = 0; it < 40; ++it) {
            const double v = f(q);
            if (v == 0.0) break;
            const Vec g = grazing_gradient(gf, obstacle, q);
            const double gn2 = g.squaredNorm();
            if (gn2 == 0.0) break;
            const Vec step = (v / gn2) * g;
            q -= step;
            if (step.norm() <= 1e-16 * std::max(1e-300, q.norm())) break;
        }
        return q;
    }

    GrazingBranch trace_branch(int side, int id) {
        GrazingBranch br;
        br.id = id;
        br.side = side;
        const double w0 = side * std::min(opt.v_seed, 0.5 * window);
        const auto a0 = root_at(w0);
        if (!a0) {
            std::ostringstream msg;
            msg << "no sign change along the scan line at transverse offset " << w0;
            throw Error(ErrorCode::SeedNotFound, msg.str());
        }
        const Vec seed = point(*a0, w0);

        // Toward the apex on a geometric ladder of transverse offsets.
        std::vector<Vec> inner;
        for (int k = 1;; ++k) {
            const double w = w0 * std::pow(10.0, -static_cast<double>(k) / opt.ladder_per_decade);
            if (std::abs(w) < opt.v_min * (1.0 - 1e-9)) break;
            const auto a = root_at(w);
            if (!a) break;
            const Vec x = point(*a, w);
            if (std::abs(f(x)) > trace_tol) break;
            inner.push_back(x);
        }
        std::reverse(inner.begin(), inner.end());
        std::vector<Vec> pts = inner;
        pts.push_back(seed);

        // Away from the apex by predictor-corrector continuation.
        Vec p = seed;
        Vec t = tangent(p, transverse * side);
        double h = std::clamp(opt.relative_step * p.norm(), opt.h_min, opt.h_max);
        while (static_cast<int>(pts.size()) < opt.max_vertices) {
            const double cap = std::clamp(opt.relative_step * p.norm(), opt.h_min, opt.h_max);
            h = std::min(h, cap);
            Vec q;
            for (;;) {
                const Vec pred = p + h * t;
                q = correct(pred);
                const bool ok = std::isfinite(q(0)) && std::abs(f(q)) <= trace_tol && (q - pred).norm() <= 0.5 * h &&
                                (q - p).dot(t) > 0.25 * h;
                if (ok) break;
                h *= 0.5;
                if (h < opt.h_min) {
                    std::ostringstream msg;
                    msg << "corrector failed below the minimum step near (" << p(0) << ", " << p(1) << ")";
                    throw Error(ErrorCode::StepCollapse, msg.str());
                }
            }
            if (!inside_box(q) || q.norm() > obstacle.radius()) {
                br.reached_window = true;
                break;
            }
            pts.push_back(q);
            t = tangent(q, t);
            p = q;
            h = std::min(1.5 * h, opt.h_max);
        }

        double arc = 0.0;
        for (size_t i = 0; i < pts.size(); ++i) {
            if (i > 0) arc += (pts[i] - pts[i - 1]).norm();
            br.vertices.push_back({pts[i], arc, std::abs(f(pts[i]))});
        }
        return br;
    }
};

}  // namespace

GrazingCurve trace_grazing_curve(const GrazingFunction& gf, const Obstacle& obstacle, double window,
                                 double trace_tol, const TraceOptions& options) {
    if (obstacle.tangential_dim() != 2)
        throw Error(ErrorCode::InvalidArgument, "curve tracing needs two tangential variables");
    if (!(trace_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "trace tolerance must be positive");
    GrazingCurve curve;
    curve.along = gf.apex_direction();
    curve.transverse.resize(2);
    curve.transverse << -curve.along(1), curve.along(0);
    curve.window = window;
    curve.trace_tol = trace_tol;
    if (window <= 0.0) return curve;
    if (window * std::sqrt(2.0) > obstacle.radius())
        throw Error(ErrorCode::DomainExceeded, "trace window does not fit inside the obstacle domain");
    const double apex = grazing_residual(gf, obstacle, Vec::Zero(2));
    if (std::abs(apex) > trace_tol) {
        std::ostringstream msg;
        msg << "apex is not grazing: residual " << apex;
        throw Error(ErrorCode::NotGrazing, msg.str());
    }
    Tracer tr{gf, obstacle, curve.along, curve.transverse, window, trace_tol, options, {}};
    tr.build_scan();
    curve.branches.push_back(tr.trace_branch(+1, 0));
    curve.branches.push_back(tr.trace_branch(-1, 1));
    return curve;
}

}  // namespace graze
