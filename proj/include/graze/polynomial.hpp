#pragma once

#include <vector>

#include "graze/linalg.hpp"

namespace graze {

using MultiIndex = std::vector<int>;

struct Term {
    MultiIndex exponents;
    double coeff = 0.0;
};

// Sparse multivariate polynomial with real coefficients. Terms are kept sorted
// by multi-index and zero coefficients are dropped, so two polynomials with the
// same value compare equal term by term.
class Polynomial {
public:
    explicit Polynomial(int nvars = 0);

    // Throws InvalidArgument on repeated multi-indices, negative exponents, or
    // multi-indices of the wrong length.
    Polynomial(int nvars, const std::vector<Term>& terms);

    static Polynomial constant(int nvars, double c);
    static Polynomial variable(int nvars, int index);

    int nvars() const { return nvars_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    // Total degree; -1 for the zero polynomial.
    int degree() const;
    // Smallest total degree among the terms; -1 for the zero polynomial.
    int min_degree() const;
    bool is_homogeneous() const;

    double coefficient(const MultiIndex& alpha) const;

    double eval(const Vec& x) const;
    Vec gradient(const Vec& x) const;
    Mat hessian(const Vec& x) const;

    Polynomial derivative(int var) const;
    Polynomial homogeneous_part(int degree) const;

    // q(y) = p(M y), with M an nvars x m matrix; q has m variables.
    Polynomial substitute_linear(const Mat& m) const;

    Polynomial operator+(const Polynomial& other) const;
    Polynomial operator-(const Polynomial& other) const;
    Polynomial operator*(const Polynomial& other) const;
    Polynomial operator*(double s) const;

private:
    static Polynomial from_unsorted(int nvars, std::vector<Term> terms);

    int nvars_;
    std::vector<Term> terms_;
};

}  // namespace graze
