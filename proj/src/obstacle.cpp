#include "graze/obstacle.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "graze/error.hpp"

namespace graze {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double fd_step(int k) { return std::pow(kEps, 1.0 / (k + 2)); }

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double factorial(int k) {
    double r = 1.0;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

}  // namespace

// ---------------------------------------------------------------- surfaces

PolynomialSurface::PolynomialSurface(Polynomial f) : f_(std::move(f)) {
    const int nv = f_.nvars();
    if (f_.coefficient(MultiIndex(static_cast<size_t>(nv), 0)) != 1.0)
        throw Error(ErrorCode::NotNormalized, "constant term of F must equal 1");
    if (!f_.homogeneous_part(1).is_zero())
        throw Error(ErrorCode::NotNormalized, "F must have no degree-one terms (grad F(0) = 0)");
}

HProfile HProfile::series(std::vector<double> coeffs) {
    HProfile h;
    h.kind_ = Kind::Series;
    h.coeffs_ = std::move(coeffs);
    double first = 0.0;
    for (double c : h.coeffs_) {
        if (c != 0.0) {
            first = c;
            break;
        }
    }
    if (first <= 0.0) throw Error(ErrorCode::InvalidObstacle, "first nonzero Taylor coefficient of h must be positive");
    return h;
}

HProfile HProfile::exp_flat() {
    HProfile h;
    h.kind_ = Kind::ExpFlat;
    return h;
}

double HProfile::value(double s) const {
    if (kind_ == Kind::ExpFlat) return s <= 0.0 ? 0.0 : std::exp(-1.0 / (s * s));
    double acc = 0.0;
    for (size_t k = coeffs_.size(); k-- > 0;) acc = acc * s + coeffs_[k];
    return acc * s;
}

double HProfile::d1(double s) const {
    if (kind_ == Kind::ExpFlat) {
        const double h = value(s);
        return h == 0.0 ? 0.0 : 2.0 * h / (s * s * s);
    }
    double acc = 0.0;
    for (size_t k = coeffs_.size(); k-- > 0;) acc = acc * s + static_cast<double>(k + 1) * coeffs_[k];
    return acc;
}

double HProfile::d2(double s) const {
    if (kind_ == Kind::ExpFlat) {
        const double h = value(s);
        if (h == 0.0) return 0.0;
        const double s2 = s * s;
        return h * (4.0 / (s2 * s2 * s2) - 6.0 / (s2 * s2));
    }
    double acc = 0.0;
    for (size_t k = coeffs_.size(); k-- > 1;) acc = acc * s + static_cast<double>((k + 1) * k) * coeffs_[k];
    return acc;
}

double HProfile::ratio(double s) const {
    if (kind_ == Kind::ExpFlat) return 0.5 * s * s * s;
    size_t m = 0;
    while (m < coeffs_.size() && coeffs_[m] == 0.0) ++m;
    // h = s^(m+1) * sum c_k s^(k-m-1), h' = s^m * sum k c_k s^(k-m-1) with k 1-based.
    double num = 0.0;
    double den = 0.0;
    for (size_t k = coeffs_.size(); k-- > m;) {
        num = num * s + coeffs_[k];
        den = den * s + static_cast<double>(k + 1) * coeffs_[k];
    }
    return s * num / den;
}

double HProfile::taylor(int k) const {
    if (kind_ == Kind::ExpFlat || k < 1 || static_cast<size_t>(k) > coeffs_.size()) return 0.0;
    return coeffs_[static_cast<size_t>(k) - 1];
}

SymmetricH::SymmetricH(HProfile h, Mat lambda) : h_(std::move(h)), lambda_(std::move(lambda)) {
    if (lambda_.rows() != lambda_.cols() || lambda_.rows() == 0)
        throw Error(ErrorCode::InvalidObstacle, "Lambda must be a nonempty square matrix");
    Eigen::FullPivLU<Mat> lu(lambda_);
    if (lu.rank() < lambda_.rows()) throw Error(ErrorCode::InvalidObstacle, "Lambda must be nonsingular");
    gram_ = lambda_.transpose() * lambda_;
}

GenericSmooth::GenericSmooth(int tangential_dim, Fn f, std::string name)
    : dim_(tangential_dim), f_(std::move(f)), name_(std::move(name)) {
    if (!f_) throw Error(ErrorCode::InvalidObstacle, "generic obstacle needs a value provider");
}

// ---------------------------------------------------------------- obstacle

Obstacle::Obstacle(Surface surface, int tangential_dim, double radius)
    : surface_(std::move(surface)), tdim_(tangential_dim), radius_(radius) {
    if (tdim_ < 1) throw Error(ErrorCode::InvalidObstacle, "need at least one tangential variable");
    if (!(radius_ > 0.0)) throw Error(ErrorCode::InvalidObstacle, "domain radius must be positive");
    if (const auto* p = as_polynomial(); p && p->poly().nvars() != tdim_)
        throw Error(ErrorCode::InvalidObstacle, "polynomial variable count does not match dimension");
    if (const auto* g = as_generic(); g && g->tangential_dim() != tdim_)
        throw Error(ErrorCode::InvalidObstacle, "generic provider dimension mismatch");
    if (const auto* sh = as_symmetric()) {
        if (sh->lambda().rows() != tdim_) throw Error(ErrorCode::InvalidObstacle, "Lambda dimension mismatch");
        // Sample h' on (0, smax], smax the largest |Lambda x|^2 over the domain.
        const double norm = Eigen::JacobiSVD<Mat>(sh->lambda()).singularValues()(0);
        const double smax = norm * norm * radius_ * radius_;
        for (int i = 1; i <= 1000; ++i) {
            const double s = smax * i / 1000.0;
            const double d = sh->h().d1(s);
            const bool underflow = sh->h().kind() == HProfile::Kind::ExpFlat && sh->h().value(s) == 0.0;
            if (!(d > 0.0) && !underflow) {
                std::ostringstream msg;
                msg << "h' is not positive at s = " << s;
                throw Error(ErrorCode::InvalidObstacle, msg.str());
            }
        }
    }
}

Obstacle Obstacle::polynomial(const Polynomial& f, double radius) {
    return Obstacle(PolynomialSurface(f), f.nvars(), radius);
}

Obstacle Obstacle::symmetric(HProfile h, const Mat& lambda, double radius) {
    const int d = static_cast<int>(lambda.rows());
    return Obstacle(SymmetricH(std::move(h), lambda), d, radius);
}

Obstacle Obstacle::generic(int tangential_dim, GenericSmooth::Fn f, std::string name, double radius) {
    return Obstacle(GenericSmooth(tangential_dim, std::move(f), std::move(name)), tangential_dim, radius);
}

Obstacle Obstacle::builtin(const std::string& name, int tangential_dim, double radius) {
    if (name == "exp-flat") {
        return generic(
            tangential_dim,
            [](const Vec& x) {
                const double r2 = x.squaredNorm();
                return r2 == 0.0 ? 1.0 : 1.0 - std::exp(-1.0 / (r2 * r2));
            },
            name, radius);
    }
    if (name == "paraboloid") {
        return generic(tangential_dim, [](const Vec& x) { return 1.0 - x.squaredNorm(); }, name, radius);
    }
    throw Error(ErrorCode::InvalidObstacle, "unknown builtin obstacle '" + name + "'");
}

bool Obstacle::contains(const Vec& x) const { return x.size() == tdim_ && x.norm() <= radius_; }

void Obstacle::check_domain(const Vec& x) const {
    if (x.size() != tdim_) throw Error(ErrorCode::InvalidArgument, "point dimension mismatch");
    if (x.norm() > radius_) {
        std::ostringstream msg;
        msg << "|x| = " << x.norm() << " exceeds domain radius " << radius_;
        throw Error(ErrorCode::DomainExceeded, msg.str());
    }
}

double Obstacle::eval(const Vec& x) const {
    check_domain(x);
    return eval_unchecked(x);
}

Vec Obstacle::grad(const Vec& x) const {
    check_domain(x);
    return grad_unchecked(x);
}

Mat Obstacle::hess(const Vec& x) const {
    check_domain(x);
    return hess_unchecked(x);
}

double Obstacle::eval_unchecked(const Vec& x) const {
    if (const auto* p = as_polynomial()) return p->poly().eval(x);
    if (const auto* sh = as_symmetric()) return 1.0 - sh->h().value((sh->lambda() * x).squaredNorm());
    return as_generic()->fn()(x);
}

Vec Obstacle::grad_unchecked(const Vec& x) const {
    if (const auto* p = as_polynomial()) return p->poly().gradient(x);
    if (const auto* sh = as_symmetric()) {
        const Vec w = sh->gram() * x;
        return -2.0 * sh->h().d1(x.dot(w)) * w;
    }
    const auto& f = as_generic()->fn();
    const double h = fd_step(1);
    Vec g(tdim_);
    for (int i = 0; i < tdim_; ++i) {
        Vec xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        g(i) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

Mat Obstacle::hess_unchecked(const Vec& x) const {
    if (const auto* p = as_polynomial()) return p->poly().hessian(x);
    if (const auto* sh = as_symmetric()) {
        const Vec w = sh->gram() * x;
        const double s = x.dot(w);
        Mat h = -2.0 * sh->h().d1(s) * sh->gram() - 4.0 * sh->h().d2(s) * (w * w.transpose());
        return 0.5 * (h + h.transpose());
    }
    const auto& f = as_generic()->fn();
    const double h = fd_step(2);
    const double f0 = f(x);
    Mat m(tdim_, tdim_);
    for (int i = 0; i < tdim_; ++i) {
        Vec xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        m(i, i) = (f(xp) - 2.0 * f0 + f(xm)) / (h * h);
        for (int j = i + 1; j < tdim_; ++j) {
            Vec pp = x, pm = x, mp = x, mm = x;
            pp(i) += h, pp(j) += h;
            pm(i) += h, pm(j) -= h;
            mp(i) -= h, mp(j) += h;
            mm(i) -= h, mm(j) -= h;
            m(i, j) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
            m(j, i) = m(i, j);
        }
    }
    return m;
}

std::vector<double> Obstacle::directional_taylor(const Vec& direction, int order) const {
    if (order > kMaxTaylorOrder) {
        throw Error(ErrorCode::OrderTooHigh,
                    "requested order " + std::to_string(order) + " exceeds " + std::to_string(kMaxTaylorOrder));
    }
    if (order < 1) throw Error(ErrorCode::InvalidArgument, "order must be positive");
    if (direction.size() != tdim_) throw Error(ErrorCode::InvalidArgument, "direction dimension mismatch");
    std::vector<double> c(static_cast<size_t>(order), 0.0);
    if (const auto* p = as_polynomial()) {
        for (int j = 1; j <= order; ++j) c[static_cast<size_t>(j) - 1] = p->poly().homogeneous_part(j).eval(direction);
        return c;
    }
    if (const auto* sh = as_symmetric()) {
        const double q = (sh->lambda() * direction).squaredNorm();
        for (int k = 1; 2 * k <= order; ++k)
            c[static_cast<size_t>(2 * k) - 1] = -sh->h().taylor(k) * std::pow(q, k);
        return c;
    }
    const auto& f = as_generic()->fn();
    for (int k = 1; k <= order; ++k) {
        const double h = fd_step(k);
        double acc = 0.0;
        for (int i = 0; i <= k; ++i) {
            const double sgn = (i % 2 == 0) ? 1.0 : -1.0;
            acc += sgn * binomial(k, i) * f(direction * ((0.5 * k - i) * h));
        }
        c[static_cast<size_t>(k) - 1] = acc / (std::pow(h, k) * factorial(k));
    }
    return c;
}

double eval_F(const Obstacle& obstacle, const Vec& x) { return obstacle.eval(x); }
Vec grad_F(const Obstacle& obstacle, const Vec& x) { return obstacle.grad(x); }
Mat hess_F(const Obstacle& obstacle, const Vec& x) { return obstacle.hess(x); }
std::vector<double> directional_taylor(const Obstacle& obstacle, const Vec& direction, int order) {
    return obstacle.directional_taylor(direction, order);
}

// ---------------------------------------------------------------- concavity

std::string to_string(ConcavityReport::Verdict verdict) {
    switch (verdict) {
        case ConcavityReport::Verdict::StrictlyConcaveOnGrid: return "StrictlyConcaveOnGrid";
        case ConcavityReport::Verdict::DegenerateAt: return "DegenerateAt";
        case ConcavityReport::Verdict::Fails: return "Fails";
    }
    return "Unknown";
}

ConcavityReport check_strict_concavity(const Obstacle& obstacle, double radius, int angles, int radii, double tol) {
    if (radius > obstacle.radius()) throw Error(ErrorCode::DomainExceeded, "concavity radius exceeds domain radius");
    const int d = obstacle.tangential_dim();
    std::vector<Vec> dirs;
    if (d == 1) {
        dirs = {Vec::Constant(1, 1.0), Vec::Constant(1, -1.0)};
    } else if (d == 2) {
        for (int a = 0; a < angles; ++a) {
            const double th = 2.0 * M_PI * a / angles;
            Vec v(2);
            v << std::cos(th), std::sin(th);
            dirs.push_back(v);
        }
    } else {
        std::mt19937_64 rng(12345);
        std::normal_distribution<double> normal;
        for (int a = 0; a < angles; ++a) {
            Vec v(d);
            for (int i = 0; i < d; ++i) v(i) = normal(rng);
            dirs.push_back(v.normalized());
        }
    }
    ConcavityReport rep;
    rep.angles = static_cast<int>(dirs.size());
    rep.radii = radii;
    // Grid index: direction-major, so point (a, j) lives at a * radii + j.
    std::vector<char> degenerate;
    bool negative = false;
    for (const auto& dir : dirs) {
        for (int j = 0; j < radii; ++j) {
            const Vec x = dir * (radius * (j + 1) / radii);
            const double lam = min_symmetric_eigenvalue(-obstacle.hess(x));
            rep.grid.push_back(x);
            rep.min_eigenvalue.push_back(lam);
            degenerate.push_back(std::abs(lam) <= tol);
            if (lam < -tol) negative = true;
        }
    }
    const int na = rep.angles;
    // Degeneracy on an open set shows up as degenerate neighbours across
    // directions (two dimensions) or along a ray (one dimension).
    bool open_degenerate = false;
    size_t n_degenerate = 0;
    for (char c : degenerate) n_degenerate += c ? 1 : 0;
    if (d == 1) {
        for (int a = 0; a < na; ++a)
            for (int j = 0; j + 1 < radii; ++j)
                if (degenerate[static_cast<size_t>(a * radii + j)] && degenerate[static_cast<size_t>(a * radii + j + 1)])
                    open_degenerate = true;
    } else if (d == 2) {
        for (int a = 0; a < na; ++a)
            for (int j = 0; j < radii; ++j)
                if (degenerate[static_cast<size_t>(a * radii + j)] &&
                    degenerate[static_cast<size_t>(((a + 1) % na) * radii + j)])
                    open_degenerate = true;
    } else {
        open_degenerate = 2 * n_degenerate > degenerate.size();
    }
    if (negative || open_degenerate) {
        rep.verdict = ConcavityReport::Verdict::Fails;
        for (size_t i = 0; i < rep.grid.size(); ++i)
            if (degenerate[i] || rep.min_eigenvalue[i] < -tol) rep.flagged.push_back(rep.grid[i]);
    } else if (n_degenerate > 0) {
        rep.verdict = ConcavityReport::Verdict::DegenerateAt;
        for (size_t i = 0; i < rep.grid.size(); ++i)
            if (degenerate[i]) rep.flagged.push_back(rep.grid[i]);
    }
    return rep;
}

// ---------------------------------------------------------------- rotation

RotatedObstacle rotate_coordinates(const Obstacle& obstacle, const Vec& b) {
    const int d = obstacle.tangential_dim();
    if (b.size() != d) throw Error(ErrorCode::InvalidArgument, "rotation vector dimension mismatch");
    const double nb = b.norm();
    if (nb == 0.0) throw Error(ErrorCode::ZeroVector, "cannot rotate onto a zero vector");
    const Vec bhat = b / nb;
    Mat q = Mat::Identity(d, d);
    Vec v = bhat;
    v(0) += 1.0;  // bhat - (-e1)
    if (v.norm() > 1e-14) {
        q -= 2.0 * v * v.transpose() / v.squaredNorm();
        // A Householder map has determinant -1; flip one other axis to get a rotation.
        if (d >= 2) q.row(d - 1) *= -1.0;
    }
    const Mat qt = q.transpose();
    if (const auto* p = obstacle.as_polynomial())
        return {Obstacle::polynomial(p->poly().substitute_linear(qt), obstacle.radius()), q};
    if (const auto* sh = obstacle.as_symmetric())
        return {Obstacle::symmetric(sh->h(), sh->lambda() * qt, obstacle.radius()), q};
    const auto f = obstacle.as_generic()->fn();
    return {Obstacle::generic(d, [f, qt](const Vec& y) { return f(qt * y); }, obstacle.as_generic()->name() + "-rotated",
                              obstacle.radius()),
            q};
}

}  // namespace graze
