#include "graze/reflection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "graze/error.hpp"

namespace graze {

std::string to_string(PointLabel label) {
    switch (label) {
        case PointLabel::Illuminated: return "Illuminated";
        case PointLabel::Grazing: return "Grazing";
        case PointLabel::Shadow: return "Shadow";
    }
    return "Unknown";
}

PointLabel label_for_margin(double margin, double tol) {
    if (margin > tol) return PointLabel::Illuminated;
    if (margin < -tol) return PointLabel::Shadow;
    return PointLabel::Grazing;
}

double reflection_margin(const Vec& grad_f, const BoundaryCovector& xi) { return grad_f.dot(xi.xibar) - xi.xi1; }

BoundaryCovector reflect_with_gradient(const Vec& grad_f, const BoundaryCovector& xi) {
    const double q = 1.0 + grad_f.squaredNorm();
    const double m = xi.xi1 - xi.xibar.dot(grad_f);
    return {xi.xbar, xi.xi1 - 2.0 * m / q, xi.xibar + (2.0 * m / q) * grad_f};
}

BoundaryCovector reflect_direction(const Obstacle& obstacle, const Vec& xbar, const BoundaryCovector& xi_i) {
    return reflect_with_gradient(obstacle.grad(xbar), xi_i);
}

BoundaryClassification classify_boundary_point(const Obstacle& obstacle, const IncomingPhase& phase, const Vec& xbar,
                                               double tol) {
    const BoundaryCovector xi = xi_incoming(phase, obstacle, xbar);
    const double mu = reflection_margin(obstacle.grad(xbar), xi);
    return {xbar, mu, label_for_margin(mu, tol)};
}

namespace {

// Incoming covector, reflected covector and slope at xbar, skipping the domain
// check so that stencils may step slightly past the declared radius.
struct LocalRays {
    Vec grad_f;
    BoundaryCovector xi_i;
    BoundaryCovector xi_r;
    Vec point;
};

LocalRays local_rays(const Obstacle& obstacle, const IncomingPhase& phase, const Vec& xbar) {
    LocalRays r;
    r.point.resize(xbar.size() + 1);
    r.point(0) = obstacle.eval_unchecked(xbar);
    r.point.tail(xbar.size()) = xbar;
    r.grad_f = obstacle.grad_unchecked(xbar);
    r.xi_i = BoundaryCovector::from_full(xbar, phase.grad(r.point));
    r.xi_r = reflect_with_gradient(r.grad_f, r.xi_i);
    return r;
}

Vec flow_full_unchecked(const Obstacle& obstacle, const IncomingPhase& phase, double s, const Vec& xbar, double t) {
    const Vec space = flow_space_unchecked(obstacle, phase, s, xbar);
    Vec y(space.size() + 1);
    y.head(space.size()) = space;
    y(space.size()) = t + 2.0 * s;
    return y;
}

}  // namespace

Vec flow_space_unchecked(const Obstacle& obstacle, const IncomingPhase& phase, double s, const Vec& xbar) {
    const LocalRays r = local_rays(obstacle, phase, xbar);
    return r.point + 2.0 * s * r.xi_r.full();
}

FlowSample flow_map(const Obstacle& obstacle, const IncomingPhase& phase, double s, const Vec& xbar, double t,
                    double tol) {
    if (s < 0.0) throw Error(ErrorCode::InvalidArgument, "ray parameter s must be nonnegative");
    const BoundaryClassification c = classify_boundary_point(obstacle, phase, xbar, tol);
    if (c.label == PointLabel::Shadow) {
        std::ostringstream msg;
        msg << "boundary point is in the shadow (margin " << c.margin << ")";
        throw Error(ErrorCode::ShadowPoint, msg.str());
    }
    const Vec p = boundary_point(obstacle, xbar);
    const BoundaryCovector xr = reflect_direction(obstacle, xbar, xi_incoming(phase, obstacle, xbar));
    FlowSample out;
    out.s = s;
    out.xbar = xbar;
    out.t = t;
    out.y.resize(p.size() + 1);
    out.y.head(p.size()) = p + 2.0 * s * xr.full();
    out.y(p.size()) = t + 2.0 * s;
    return out;
}

Mat reflected_direction_jacobian_fd(const Obstacle& obstacle, const IncomingPhase& phase, const Vec& xbar,
                                    double step) {
    if (!(step > 0.0)) throw Error(ErrorCode::StepInvalid, "difference step must be positive");
    const int d = static_cast<int>(xbar.size());
    Mat m(d, d);
    for (int j = 0; j < d; ++j) {
        Vec xp = xbar, xm = xbar;
        xp(j) += step;
        xm(j) -= step;
        m.col(j) = (local_rays(obstacle, phase, xp).xi_r.xibar - local_rays(obstacle, phase, xm).xi_r.xibar) /
                   (2.0 * step);
    }
    return m;
}

double jacobian_fd(const Obstacle& obstacle, const IncomingPhase& phase, double s, const Vec& xbar, double t,
                   double step, double tol) {
    if (!(step > 0.0)) throw Error(ErrorCode::StepInvalid, "difference step must be positive");
    (void)flow_map(obstacle, phase, s, xbar, t, tol);
    const int d = static_cast<int>(xbar.size());
    const int m = d + 2;
    Mat jac(m, m);
    // Columns ordered (s, xbar, t).
    jac.col(0) = (flow_full_unchecked(obstacle, phase, s + step, xbar, t) -
                  flow_full_unchecked(obstacle, phase, s - step, xbar, t)) /
                 (2.0 * step);
    for (int j = 0; j < d; ++j) {
        Vec xp = xbar, xm = xbar;
        xp(j) += step;
        xm(j) -= step;
        jac.col(1 + j) = (flow_full_unchecked(obstacle, phase, s, xp, t) -
                          flow_full_unchecked(obstacle, phase, s, xm, t)) /
                         (2.0 * step);
    }
    jac.col(m - 1) = (flow_full_unchecked(obstacle, phase, s, xbar, t + step) -
                      flow_full_unchecked(obstacle, phase, s, xbar, t - step)) /
                     (2.0 * step);
    return jac.determinant();
}

JacobianReport jacobian_analytic(const Obstacle& obstacle, const IncomingPhase& phase, double s, const Vec& xbar,
                                 double tol, double fd_step) {
    const int d = obstacle.tangential_dim();
    const Vec gf = obstacle.grad(xbar);
    const Mat hf = obstacle.hess(xbar);
    const BoundaryCovector xi = xi_incoming(phase, obstacle, xbar);
    const BoundaryCovector xr = reflect_with_gradient(gf, xi);
    const double mu = reflection_margin(gf, xi);
    if (std::abs(mu) <= tol) {
        std::ostringstream msg;
        msg << "margin " << mu << " is within the grazing tolerance";
        throw Error(ErrorCode::GrazingSingular, msg.str());
    }
    if (mu < 0.0) throw Error(ErrorCode::ShadowPoint, "Jacobian requested at a shadow point");

    const Mat dxi = xi_incoming_jacobian(phase, obstacle, xbar);
    const Vec grad_xi1 = dxi.row(0).transpose();
    const Mat dxibar = dxi.bottomRows(d);
    const Mat eye = Mat::Identity(d, d);
    const double q = 1.0 + gf.squaredNorm();

    JacobianReport r;
    r.mu = mu;
    r.xi1_r = xr.xi1;
    r.lower_bound = 2.0 * mu;
    r.B = eye - xr.xibar * gf.transpose() / xr.xi1;
    r.C = eye + xr.xibar * xr.xibar.transpose() / (xr.xi1 * xr.xi1);
    r.K = dxibar + (2.0 / q) * gf * (grad_xi1 - dxibar.transpose() * gf).transpose();
    r.L = (xi.xi1 - xr.xi1) * hf - (2.0 / q) * gf * (hf * xr.xibar).transpose();
    r.A = r.B + 2.0 * s * r.C * (r.K + r.L);
    r.j_direct = 2.0 * xr.xi1 * r.A.determinant();

    r.BtK = dxibar + gf * grad_xi1.transpose();
    r.BtL = (xi.xi1 - xr.xi1) * hf;
    // B = I + a b^T with a = -xibar^r / xi1^r and b = grad F; the lemma gives
    // 1 + <a,b> = mu / xi1^r, so B^-1 = I + xibar^r grad F^T / mu and
    // B^-1 C B^-T = B^-1 B^-T + (xibar^r / mu)(xibar^r / mu)^T.
    const Mat b_inv = eye + xr.xibar * gf.transpose() / mu;
    const Vec c_vec = xr.xibar / mu;
    const Mat m = b_inv * b_inv.transpose() + c_vec * c_vec.transpose();
    r.j_analytic = 2.0 * mu * (eye + 2.0 * s * m * (r.BtK + r.BtL)).determinant();

    r.dxibar_r_fd = reflected_direction_jacobian_fd(obstacle, phase, xbar, fd_step);
    r.j_fd = jacobian_fd(obstacle, phase, s, xbar, 0.0, fd_step, tol);
    return r;
}

// ---------------------------------------------------------------- inversion

namespace {

std::vector<Vec> seed_grid(int d, double radius, int grid) {
    std::vector<Vec> pts;
    if (d == 1) {
        for (int i = 0; i < grid; ++i) pts.push_back(Vec::Constant(1, -radius + 2.0 * radius * i / (grid - 1)));
    } else if (d == 2) {
        for (int i = 0; i < grid; ++i) {
            for (int j = 0; j < grid; ++j) {
                Vec x(2);
                x << -radius + 2.0 * radius * i / (grid - 1), -radius + 2.0 * radius * j / (grid - 1);
                if (x.norm() <= radius) pts.push_back(x);
            }
        }
    } else {
        std::mt19937_64 rng(7);
        std::normal_distribution<double> normal;
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int k = 0; k < grid * grid; ++k) {
            Vec v(d);
            for (int i = 0; i < d; ++i) v(i) = normal(rng);
            pts.push_back(v.normalized() * radius * std::pow(unif(rng), 1.0 / d));
        }
    }
    return pts;
}

}  // namespace

FlowPreimage invert_flow(const Obstacle& obstacle, const IncomingPhase& phase, const Vec& y,
                         const std::optional<FlowSeed>& seed, const InvertOptions& options) {
    const int n = obstacle.dim();
    const int d = n - 1;
    if (y.size() != n + 1) throw Error(ErrorCode::InvalidArgument, "spacetime point must have n + 1 components");
    const Vec ys = y.head(n);
    const Vec ybar = ys.tail(d);
    if (obstacle.contains(ybar) && ys(0) < obstacle.eval(ybar) - 1e-12)
        throw Error(ErrorCode::OutsideRange, "point lies inside the obstacle");

    const double radius = options.radius > 0.0 ? std::min(options.radius, obstacle.radius()) : obstacle.radius();
    FlowSeed start;
    if (seed) {
        start = *seed;
    } else {
        double best = std::numeric_limits<double>::infinity();
        bool found = false;
        for (const Vec& x : seed_grid(d, radius, options.grid)) {
            const LocalRays r = local_rays(obstacle, phase, x);
            if (reflection_margin(r.grad_f, r.xi_i) < options.seed_margin) continue;
            const Vec dir = r.xi_r.full();
            const double s = std::clamp(0.5 * dir.dot(ys - r.point), 0.0, options.s_max);
            const double dist = (r.point + 2.0 * s * dir - ys).norm();
            if (dist < best) {
                best = dist;
                start = {s, x};
                found = true;
            }
        }
        if (!found) throw Error(ErrorCode::OutsideRange, "no illuminated boundary point away from grazing in the seed grid");
    }
    {
        const LocalRays r = local_rays(obstacle, phase, start.xbar);
        const double mu = reflection_margin(r.grad_f, r.xi_i);
        if (mu < options.seed_margin) {
            std::ostringstream msg;
            msg << "seed margin " << mu << " is below " << options.seed_margin;
            throw Error(ErrorCode::GrazingSingular, msg.str());
        }
    }

    Vec z(n);
    z(0) = start.s;
    z.tail(d) = start.xbar;
    auto residual = [&](const Vec& zz) { return Vec(flow_space_unchecked(obstacle, phase, zz(0), zz.tail(d)) - ys); };
    Vec r = residual(z);
    double rn = r.norm();
    const double target = 1e-14 * std::max(1.0, ys.norm());
    int it = 0;
    for (; it < options.max_iterations && rn > target; ++it) {
        Mat jac(n, n);
        const double h = 1e-7;
        for (int j = 0; j < n; ++j) {
            Vec zp = z, zm = z;
            zp(j) += h;
            zm(j) -= h;
            jac.col(j) = (residual(zp) - residual(zm)) / (2.0 * h);
        }
        const Vec delta = jac.colPivHouseholderQr().solve(-r);
        double lambda = 1.0;
        bool improved = false;
        while (lambda > 1e-10) {
            Vec trial = z + lambda * delta;
            if (trial.tail(d).norm() <= obstacle.radius()) {
                const Vec rt = residual(trial);
                if (rt.norm() < rn) {
                    z = trial;
                    r = rt;
                    rn = rt.norm();
                    improved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if (!improved) break;
    }
    if (!(rn <= options.tolerance)) {
        std::ostringstream msg;
        msg << "Newton stopped after " << it << " iterations with residual " << rn;
        throw Error(ErrorCode::NoConvergence, msg.str());
    }
    FlowPreimage out;
    out.s = z(0);
    out.xbar = z.tail(d);
    out.t = y(n) - 2.0 * out.s;
    out.iterations = it;
    out.residual = rn;
    if (out.s < -options.tolerance) throw Error(ErrorCode::OutsideRange, "preimage has negative ray parameter");
    if (classify_boundary_point(obstacle, phase, out.xbar).label == PointLabel::Shadow)
        throw Error(ErrorCode::OutsideRange, "preimage foot point lies in the shadow");
    return out;
}

ReflectedPhaseValue reflected_phase_at(const Obstacle& obstacle, const IncomingPhase& phase, const Vec& y,
                                       const std::optional<FlowSeed>& seed, const InvertOptions& options) {
    ReflectedPhaseValue out;
    out.preimage = invert_flow(obstacle, phase, y, seed, options);
    const Vec& x = out.preimage.xbar;
    out.value = -out.preimage.t + boundary_trace(phase, obstacle, x);
    const BoundaryCovector xr = reflect_direction(obstacle, x, xi_incoming(phase, obstacle, x));
    out.gradient.resize(obstacle.dim() + 1);
    out.gradient.head(obstacle.dim()) = xr.full();
    out.gradient(obstacle.dim()) = -1.0;
    return out;
}

// ---------------------------------------------------------------- verifier

RfmVerdict verify_rfm(const Obstacle& obstacle, const IncomingPhase& phase, const RfmOptions& opt) {
    if (opt.budget <= 0) throw Error(ErrorCode::InvalidBudget, "sample budget must be positive");
    const int d = obstacle.tangential_dim();
    const double radius = std::min(opt.radius, obstacle.radius());
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal;
    auto random_point = [&]() {
        Vec v(d);
        for (int i = 0; i < d; ++i) v(i) = normal(rng);
        return Vec(v.normalized() * radius * std::pow(unif(rng), 1.0 / d));
    };

    RfmVerdict out;
    out.min_separation_ratio = std::numeric_limits<double>::infinity();
    out.min_j_minus_bound = std::numeric_limits<double>::infinity();
    std::vector<double> severity;
    const long max_attempts = 200L * opt.budget;
    long attempts = 0;
    while (static_cast<int>(out.rows.size()) < opt.budget && attempts < max_attempts) {
        ++attempts;
        RfmRow row;
        row.s = opt.s0 * unif(rng);
        row.xbar = random_point();
        row.t = 2.0 * unif(rng) - 1.0;
        const BoundaryClassification c = classify_boundary_point(obstacle, phase, row.xbar, opt.tol);
        if (c.label == PointLabel::Shadow) continue;
        row.mu = c.margin;
        row.bound = 2.0 * c.margin;
        row.j_fd = jacobian_fd(obstacle, phase, row.s, row.xbar, row.t, opt.fd_step, opt.tol);
        double bad = 0.0;
        if (c.label == PointLabel::Grazing) {
            ++out.grazing;
            row.j_analytic = std::numeric_limits<double>::quiet_NaN();
        } else {
            ++out.illuminated;
            const JacobianReport rep = jacobian_analytic(obstacle, phase, row.s, row.xbar, opt.tol, opt.fd_step);
            row.j_analytic = rep.j_analytic;
            const double gap = rep.j_analytic - row.bound;
            out.min_j_minus_bound = std::min(out.min_j_minus_bound, gap);
            if (gap < -opt.bound_slack) {
                row.pass = false;
                ++out.bound_failures;
                bad = std::max(bad, -gap);
            }
            const double diff = std::abs(rep.j_analytic - row.j_fd);
            const double scale = std::max(std::abs(rep.j_analytic), std::abs(row.j_fd));
            const double rel = scale > 0.0 ? diff / scale : 0.0;
            out.worst_relative_error = std::max(out.worst_relative_error, rel);
            if (rel > opt.rel_tol && diff > opt.abs_floor) {
                row.pass = false;
                ++out.agreement_failures;
                bad = std::max(bad, rel);
            }
        }
        if (!row.pass) {
            out.worst.push_back(row);
            severity.push_back(bad);
        }
        out.rows.push_back(std::move(row));
    }
    if (out.rows.empty()) {
        out.pass = false;
        out.failures.push_back("no illuminated or grazing samples found in the sampling region");
        return out;
    }
    if (out.illuminated == 0) out.min_j_minus_bound = 0.0;

    // Collision sweep over spatial images sorted by their first coordinate.
    struct Image {
        Vec y;
        Vec dom;
    };
    std::vector<Image> images;
    images.reserve(out.rows.size());
    for (const auto& row : out.rows) {
        Vec dom(d + 1);
        dom(0) = row.s;
        dom.tail(d) = row.xbar;
        images.push_back({flow_space_unchecked(obstacle, phase, row.s, row.xbar), dom});
    }
    std::sort(images.begin(), images.end(), [](const Image& a, const Image& b) { return a.y(0) < b.y(0); });
    for (size_t i = 0; i < images.size(); ++i) {
        for (size_t j = i + 1; j < images.size() && images[j].y(0) - images[i].y(0) <= opt.collision_image; ++j) {
            if ((images[j].y - images[i].y).norm() <= opt.collision_image &&
                (images[j].dom - images[i].dom).norm() > opt.collision_domain)
                ++out.collisions;
        }
    }

    // Near pairs: image separation relative to domain separation.
    std::uniform_int_distribution<size_t> pick(0, out.rows.size() - 1);
    for (int k = 0; k < opt.near_pairs; ++k) {
        const RfmRow& base = out.rows[pick(rng)];
        Vec dir(d + 1);
        for (int i = 0; i <= d; ++i) dir(i) = normal(rng);
        dir.normalize();
        const double len = std::pow(10.0, -6.0 + 3.0 * unif(rng));
        const double s2 = base.s + len * dir(0);
        const Vec x2 = base.xbar + len * dir.tail(d);
        if (s2 < 0.0 || s2 > opt.s0 || x2.norm() > radius) continue;
        if (classify_boundary_point(obstacle, phase, x2, opt.tol).label == PointLabel::Shadow) continue;
        const Vec y1 = flow_space_unchecked(obstacle, phase, base.s, base.xbar);
        const Vec y2 = flow_space_unchecked(obstacle, phase, s2, x2);
        const double ratio = (y2 - y1).norm() / len;
        out.min_separation_ratio = std::min(out.min_separation_ratio, ratio);
        if (ratio < opt.separation_c) ++out.separation_failures;
    }
    if (!std::isfinite(out.min_separation_ratio)) out.min_separation_ratio = 0.0;

    // Keep the five worst failing rows.
    std::vector<size_t> order(out.worst.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return severity[a] > severity[b]; });
    std::vector<RfmRow> worst;
    for (size_t i = 0; i < order.size() && i < 5; ++i) worst.push_back(out.worst[order[i]]);
    out.worst = std::move(worst);

    if (static_cast<int>(out.rows.size()) < opt.budget)
        out.failures.push_back("only " + std::to_string(out.rows.size()) + " admissible samples found");
    if (out.bound_failures > 0)
        out.failures.push_back(std::to_string(out.bound_failures) + " samples violate j >= 2 mu (Jacobian sign change)");
    if (out.agreement_failures > 0)
        out.failures.push_back(std::to_string(out.agreement_failures) + " samples disagree with the difference Jacobian");
    if (out.collisions > 0) out.failures.push_back(std::to_string(out.collisions) + " image collisions");
    if (out.separation_failures > 0)
        out.failures.push_back(std::to_string(out.separation_failures) + " near pairs collapse under the flow map");
    out.pass = out.failures.empty();
    return out;
}

}  // namespace graze
