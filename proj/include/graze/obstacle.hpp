#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "graze/linalg.hpp"
#include "graze/polynomial.hpp"

namespace graze {

inline constexpr int kMaxTaylorOrder = 16;

// Boundary x1 = F(xbar) with F a polynomial in the tangential variables.
// Construction checks F(0) = 1 and the absence of degree-one terms.
class PolynomialSurface {
public:
    explicit PolynomialSurface(Polynomial f);
    const Polynomial& poly() const { return f_; }

private:
    Polynomial f_;
};

// Profile h with h(0) = 0, given either by its Taylor coefficients
// h(s) = sum_{k>=1} c_k s^k or by the flat function exp(-1/s^2).
class HProfile {
public:
    enum class Kind { Series, ExpFlat };

    static HProfile series(std::vector<double> coeffs);
    static HProfile exp_flat();

    Kind kind() const { return kind_; }
    const std::vector<double>& coeffs() const { return coeffs_; }

    double value(double s) const;
    double d1(double s) const;
    double d2(double s) const;
    // h(s)/h'(s), evaluated without forming 0/0 for small s.
    double ratio(double s) const;
    // k-th Taylor coefficient at 0 (k >= 1); identically zero for ExpFlat.
    double taylor(int k) const;

private:
    Kind kind_ = Kind::Series;
    std::vector<double> coeffs_;
};

// F(xbar) = 1 - h(|Lambda xbar|^2).
class SymmetricH {
public:
    SymmetricH(HProfile h, Mat lambda);
    const HProfile& h() const { return h_; }
    const Mat& lambda() const { return lambda_; }
    const Mat& gram() const { return gram_; }

private:
    HProfile h_;
    Mat lambda_;
    Mat gram_;  // Lambda^T Lambda
};

// Arbitrary smooth F supplied as a value provider; derivatives by central
// differences with step eps^(1/(k+2)) for the k-th derivative.
class GenericSmooth {
public:
    using Fn = std::function<double(const Vec&)>;
    GenericSmooth(int tangential_dim, Fn f, std::string name);
    const Fn& fn() const { return f_; }
    const std::string& name() const { return name_; }
    int tangential_dim() const { return dim_; }

private:
    int dim_;
    Fn f_;
    std::string name_;
};

using Surface = std::variant<PolynomialSurface, SymmetricH, GenericSmooth>;

class Obstacle {
public:
    Obstacle(Surface surface, int tangential_dim, double radius = 1.0);

    static Obstacle polynomial(const Polynomial& f, double radius = 1.0);
    static Obstacle symmetric(HProfile h, const Mat& lambda, double radius = 1.0);
    static Obstacle generic(int tangential_dim, GenericSmooth::Fn f, std::string name, double radius = 1.0);
    // 1 - exp(-1/|xbar|^4) through the generic provider path.
    static Obstacle builtin(const std::string& name, int tangential_dim, double radius = 1.0);

    int tangential_dim() const { return tdim_; }
    // Ambient spatial dimension n.
    int dim() const { return tdim_ + 1; }
    double radius() const { return radius_; }
    const Surface& surface() const { return surface_; }
    const PolynomialSurface* as_polynomial() const { return std::get_if<PolynomialSurface>(&surface_); }
    const SymmetricH* as_symmetric() const { return std::get_if<SymmetricH>(&surface_); }
    const GenericSmooth* as_generic() const { return std::get_if<GenericSmooth>(&surface_); }

    // These throw DomainExceeded outside the closed ball of the declared radius.
    double eval(const Vec& x) const;
    Vec grad(const Vec& x) const;
    Mat hess(const Vec& x) const;

    // Same quantities without the domain check, for difference stencils that
    // straddle the domain edge.
    double eval_unchecked(const Vec& x) const;
    Vec grad_unchecked(const Vec& x) const;
    Mat hess_unchecked(const Vec& x) const;

    // Coefficients c_1..c_J of F(s d) = 1 + sum_j c_j s^j. Throws OrderTooHigh
    // for J > kMaxTaylorOrder.
    std::vector<double> directional_taylor(const Vec& direction, int order) const;

    bool contains(const Vec& x) const;

private:
    void check_domain(const Vec& x) const;

    Surface surface_;
    int tdim_;
    double radius_;
};

double eval_F(const Obstacle& obstacle, const Vec& x);
Vec grad_F(const Obstacle& obstacle, const Vec& x);
Mat hess_F(const Obstacle& obstacle, const Vec& x);
std::vector<double> directional_taylor(const Obstacle& obstacle, const Vec& direction, int order);

struct ConcavityReport {
    enum class Verdict { StrictlyConcaveOnGrid, DegenerateAt, Fails };

    std::vector<Vec> grid;
    std::vector<double> min_eigenvalue;  // smallest eigenvalue of -hess F per grid point
    Verdict verdict = Verdict::StrictlyConcaveOnGrid;
    std::vector<Vec> flagged;  // degenerate or failing points, depending on the verdict
    int angles = 0;
    int radii = 0;
};

std::string to_string(ConcavityReport::Verdict verdict);

// Polar grid of `angles` x `radii` points (origin excluded). In one tangential
// dimension the grid is the set of points +-r; above two, the angles are
// replaced by a fixed quasi-random set of directions.
ConcavityReport check_strict_concavity(const Obstacle& obstacle, double radius, int angles = 64, int radii = 32,
                                       double tol = 1e-12);

struct RotatedObstacle {
    Obstacle obstacle;
    Mat rotation;  // Q with F_rot(Q x) = F(x) and Q b = (-|b|, 0, ..., 0)
};

RotatedObstacle rotate_coordinates(const Obstacle& obstacle, const Vec& b);

}  // namespace graze
