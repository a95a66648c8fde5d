#include <cmath>
#include <sstream>

#include "graze/error.hpp"
#include "graze/grazing.hpp"
#include "graze/reflection.hpp"

namespace graze {

GrazingFunction GrazingFunction::spherical_h(const Vec& bbar) { return {Kind::SphericalH, bbar}; }
GrazingFunction GrazingFunction::planar_g(const Vec& thetabar) { return {Kind::PlanarG, thetabar}; }
GrazingFunction GrazingFunction::symmetric_zeta(const Vec& bbar) { return {Kind::SymmetricZeta, bbar}; }

GrazingFunction GrazingFunction::for_phase(const IncomingPhase& phase, const Obstacle& obstacle) {
    if (phase.dim() != obstacle.dim()) throw Error(ErrorCode::InvalidArgument, "phase and obstacle dimensions differ");
    const int d = obstacle.tangential_dim();
    if (const auto* s = phase.as_spherical()) {
        if (std::abs(s->b(0) - 1.0) > 1e-12)
            throw Error(ErrorCode::NotNormalized, "spherical source must have b1 = 1 for apex grazing");
        return spherical_h(s->b.tail(d));
    }
    if (const auto* p = phase.as_plane()) {
        if (std::abs(p->theta(0)) > 1e-12)
            throw Error(ErrorCode::NotNormalized, "plane wave must have theta1 = 0 for apex grazing");
        return planar_g(p->theta.tail(d));
    }
    throw Error(ErrorCode::InvalidArgument, "grazing functions are defined for plane and spherical phases only");
}

Vec GrazingFunction::apex_direction() const {
    const double n = param.norm();
    if (n == 0.0) throw Error(ErrorCode::ZeroVector, "grazing function parameter vanishes");
    return kind == Kind::PlanarG ? Vec(param / n) : Vec(-param / n);
}

std::string GrazingFunction::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::SphericalH: os << "spherical-H"; break;
        case Kind::PlanarG: os << "planar-G"; break;
        case Kind::SymmetricZeta: os << "symmetric-zeta"; break;
    }
    os << " (";
    for (Eigen::Index i = 0; i < param.size(); ++i) os << (i ? " " : "") << param(i);
    os << ")";
    return os.str();
}

double symmetric_zeta(const Obstacle& obstacle, const Vec& bbar, const Vec& xbar) {
    const auto* sh = obstacle.as_symmetric();
    if (!sh) throw Error(ErrorCode::InvalidArgument, "zeta needs a symmetric obstacle");
    const double norm = Eigen::JacobiSVD<Mat>(sh->lambda()).singularValues()(0);
    const double smax = norm * norm * obstacle.radius() * obstacle.radius();
    const Vec lx = sh->lambda() * xbar;
    const double s = lx.squaredNorm();
    if (s > smax * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "|Lambda x|^2 = " << s << " lies outside the validated h-domain [0, " << smax << "]";
        throw Error(ErrorCode::HDomainExceeded, msg.str());
    }
    if (s == 0.0) return 0.0;
    return -sh->h().ratio(s) + 2.0 * s - 2.0 * lx.dot(sh->lambda() * bbar);
}

double grazing_residual(const GrazingFunction& gf, const Obstacle& obstacle, const Vec& xbar) {
    switch (gf.kind) {
        case GrazingFunction::Kind::SphericalH:
            return obstacle.eval(xbar) - 1.0 - obstacle.grad(xbar).dot(xbar - gf.param);
        case GrazingFunction::Kind::PlanarG:
            return -obstacle.grad(xbar).dot(gf.param);
        case GrazingFunction::Kind::SymmetricZeta:
            return symmetric_zeta(obstacle, gf.param, xbar);
    }
    return 0.0;
}

Vec grazing_gradient(const GrazingFunction& gf, const Obstacle& obstacle, const Vec& xbar) {
    switch (gf.kind) {
        case GrazingFunction::Kind::SphericalH:
            return -obstacle.hess(xbar) * (xbar - gf.param);
        case GrazingFunction::Kind::PlanarG:
            return -obstacle.hess(xbar) * gf.param;
        case GrazingFunction::Kind::SymmetricZeta: {
            const double h = 1e-7;
            Vec g(xbar.size());
            for (Eigen::Index i = 0; i < xbar.size(); ++i) {
                Vec xp = xbar, xm = xbar;
                xp(i) += h;
                xm(i) -= h;
                g(i) = (symmetric_zeta(obstacle, gf.param, xp) - symmetric_zeta(obstacle, gf.param, xm)) / (2.0 * h);
            }
            return g;
        }
    }
    return Vec();
}

std::vector<double> scan_sign_changes_1d(const GrazingFunction& gf, const Obstacle& obstacle, double lo, double hi,
                                         int samples) {
    if (obstacle.tangential_dim() != 1) throw Error(ErrorCode::InvalidArgument, "scan needs one tangential variable");
    if (samples < 2 || !(hi > lo)) throw Error(ErrorCode::InvalidArgument, "scan needs lo < hi and two samples");
    auto f = [&](double x) { return grazing_residual(gf, obstacle, Vec::Constant(1, x)); };
    std::vector<double> roots;
    double prev_x = 0.0;
    int prev_sign = 0;
    for (int i = 0; i < samples; ++i) {
        const double x = lo + (hi - lo) * i / (samples - 1);
        const double v = f(x);
        const int sign = (v > 0.0) - (v < 0.0);
        if (sign == 0) continue;
        if (prev_sign != 0 && sign != prev_sign) {
            double a = prev_x, b = x;
            for (int k = 0; k < 200 && b - a > 1e-15; ++k) {
                const double m = 0.5 * (a + b);
                const double fm = f(m);
                const int sm = (fm > 0.0) - (fm < 0.0);
                if (sm == 0) {
                    a = b = m;
                    break;
                }
                (sm == prev_sign ? a : b) = m;
            }
            roots.push_back(0.5 * (a + b));
        }
        prev_x = x;
        prev_sign = sign;
    }
    return roots;
}

FlowoutLine flowout_line(const Obstacle& obstacle, const IncomingPhase& phase, const Vec& xbar,
                         const std::vector<double>& s_values, double t, double grazing_tol) {
    const BoundaryClassification c = classify_boundary_point(obstacle, phase, xbar, grazing_tol);
    if (c.label != PointLabel::Grazing) {
        std::ostringstream msg;
        msg << "flowout requested from a " << to_string(c.label) << " point (margin " << c.margin << ")";
        throw Error(ErrorCode::NotGrazing, msg.str());
    }
    const Vec p = boundary_point(obstacle, xbar);
    const Vec xi = xi_incoming(phase, obstacle, xbar).full();
    FlowoutLine line;
    line.vertex = xbar;
    for (double s : s_values) {
        Vec q(p.size() + 1);
        q.head(p.size()) = p + 2.0 * s * xi;
        q(p.size()) = t + 2.0 * s;
        line.points.push_back(q);
    }
    return line;
}

FlowoutSheet shadow_boundary_flowout(const Obstacle& obstacle, const IncomingPhase& phase, const GrazingCurve& curve,
                                     const std::vector<double>& s_values, double t, double grazing_tol) {
    FlowoutSheet sheet;
    for (const auto& br : curve.branches)
        for (const auto& v : br.vertices)
            sheet.lines.push_back(flowout_line(obstacle, phase, v.x, s_values, t, grazing_tol));
    return sheet;
}

}  // namespace graze
