#include "graze/polynomial.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

#include "graze/error.hpp"

namespace graze {

namespace {

int total_degree(const MultiIndex& alpha) { return std::accumulate(alpha.begin(), alpha.end(), 0); }

// pw[i][k] = x_i^k for k <= max_deg.
std::vector<std::vector<double>> power_table(const Vec& x, int max_deg) {
    std::vector<std::vector<double>> pw(static_cast<size_t>(x.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        auto& row = pw[static_cast<size_t>(i)];
        row.resize(static_cast<size_t>(std::max(max_deg, 0)) + 1);
        row[0] = 1.0;
        for (int k = 1; k <= max_deg; ++k) row[static_cast<size_t>(k)] = row[static_cast<size_t>(k) - 1] * x(i);
    }
    return pw;
}

}  // namespace

Polynomial::Polynomial(int nvars) : nvars_(nvars) {
    if (nvars < 0) throw Error(ErrorCode::InvalidArgument, "negative variable count");
}

Polynomial::Polynomial(int nvars, const std::vector<Term>& terms) : nvars_(nvars) {
    if (nvars < 0) throw Error(ErrorCode::InvalidArgument, "negative variable count");
    std::map<MultiIndex, double> seen;
    for (const auto& t : terms) {
        if (static_cast<int>(t.exponents.size()) != nvars)
            throw Error(ErrorCode::InvalidArgument, "multi-index length " + std::to_string(t.exponents.size()) +
                                                        " does not match " + std::to_string(nvars) + " variables");
        for (int e : t.exponents)
            if (e < 0) throw Error(ErrorCode::InvalidArgument, "negative exponent in multi-index");
        if (!seen.emplace(t.exponents, t.coeff).second)
            throw Error(ErrorCode::InvalidArgument, "repeated multi-index in polynomial terms");
    }
    for (const auto& [alpha, c] : seen)
        if (c != 0.0) terms_.push_back({alpha, c});
}

Polynomial Polynomial::from_unsorted(int nvars, std::vector<Term> terms) {
    std::map<MultiIndex, double> acc;
    for (auto& t : terms) acc[t.exponents] += t.coeff;
    Polynomial p(nvars);
    for (const auto& [alpha, c] : acc)
        if (c != 0.0) p.terms_.push_back({alpha, c});
    return p;
}

Polynomial Polynomial::constant(int nvars, double c) {
    return Polynomial(nvars, {Term{MultiIndex(static_cast<size_t>(nvars), 0), c}});
}

Polynomial Polynomial::variable(int nvars, int index) {
    MultiIndex alpha(static_cast<size_t>(nvars), 0);
    alpha.at(static_cast<size_t>(index)) = 1;
    return Polynomial(nvars, {Term{alpha, 1.0}});
}

int Polynomial::degree() const {
    int d = -1;
    for (const auto& t : terms_) d = std::max(d, total_degree(t.exponents));
    return d;
}

int Polynomial::min_degree() const {
    if (terms_.empty()) return -1;
    int d = total_degree(terms_.front().exponents);
    for (const auto& t : terms_) d = std::min(d, total_degree(t.exponents));
    return d;
}

bool Polynomial::is_homogeneous() const { return degree() == min_degree(); }

double Polynomial::coefficient(const MultiIndex& alpha) const {
    for (const auto& t : terms_)
        if (t.exponents == alpha) return t.coeff;
    return 0.0;
}

double Polynomial::eval(const Vec& x) const {
    if (x.size() != nvars_) throw Error(ErrorCode::InvalidArgument, "point dimension mismatch");
    const auto pw = power_table(x, degree());
    double sum = 0.0;
    for (const auto& t : terms_) {
        double m = t.coeff;
        for (size_t i = 0; i < t.exponents.size(); ++i) m *= pw[i][static_cast<size_t>(t.exponents[i])];
        sum += m;
    }
    return sum;
}

Vec Polynomial::gradient(const Vec& x) const {
    if (x.size() != nvars_) throw Error(ErrorCode::InvalidArgument, "point dimension mismatch");
    const auto pw = power_table(x, degree());
    Vec g = Vec::Zero(nvars_);
    for (const auto& t : terms_) {
        for (size_t k = 0; k < t.exponents.size(); ++k) {
            const int ek = t.exponents[k];
            if (ek == 0) continue;
            double m = t.coeff * ek;
            for (size_t i = 0; i < t.exponents.size(); ++i) {
                const int e = (i == k) ? ek - 1 : t.exponents[i];
                m *= pw[i][static_cast<size_t>(e)];
            }
            g(static_cast<Eigen::Index>(k)) += m;
        }
    }
    return g;
}

Mat Polynomial::hessian(const Vec& x) const {
    if (x.size() != nvars_) throw Error(ErrorCode::InvalidArgument, "point dimension mismatch");
    const auto pw = power_table(x, degree());
    Mat h = Mat::Zero(nvars_, nvars_);
    for (const auto& t : terms_) {
        for (size_t a = 0; a < t.exponents.size(); ++a) {
            for (size_t b = a; b < t.exponents.size(); ++b) {
                MultiIndex e = t.exponents;
                double factor = t.coeff;
                factor *= e[a];
                e[a] -= 1;
                if (factor == 0.0) continue;
                factor *= e[b];
                e[b] -= 1;
                if (factor == 0.0) continue;
                for (size_t i = 0; i < e.size(); ++i) factor *= pw[i][static_cast<size_t>(e[i])];
                h(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += factor;
            }
        }
    }
    // Fill the lower triangle from the upper one so the result is exactly symmetric.
    for (Eigen::Index a = 0; a < nvars_; ++a)
        for (Eigen::Index b = 0; b < a; ++b) h(a, b) = h(b, a);
    return h;
}

Polynomial Polynomial::derivative(int var) const {
    std::vector<Term> out;
    for (const auto& t : terms_) {
        const int e = t.exponents.at(static_cast<size_t>(var));
        if (e == 0) continue;
        Term d = t;
        d.coeff *= e;
        d.exponents[static_cast<size_t>(var)] -= 1;
        out.push_back(d);
    }
    return from_unsorted(nvars_, std::move(out));
}

Polynomial Polynomial::homogeneous_part(int deg) const {
    Polynomial p(nvars_);
    for (const auto& t : terms_)
        if (total_degree(t.exponents) == deg) p.terms_.push_back(t);
    return p;
}

Polynomial Polynomial::substitute_linear(const Mat& m) const {
    if (m.rows() != nvars_) throw Error(ErrorCode::InvalidArgument, "substitution matrix row count mismatch");
    const int mvars = static_cast<int>(m.cols());
    // Linear forms l_i(y) = sum_k m(i,k) y_k and their powers, built lazily.
    std::vector<std::vector<Polynomial>> powers(static_cast<size_t>(nvars_));
    for (int i = 0; i < nvars_; ++i) {
        std::vector<Term> lin;
        for (int k = 0; k < mvars; ++k) {
            MultiIndex alpha(static_cast<size_t>(mvars), 0);
            alpha[static_cast<size_t>(k)] = 1;
            lin.push_back({alpha, m(i, k)});
        }
        powers[static_cast<size_t>(i)].push_back(constant(mvars, 1.0));
        powers[static_cast<size_t>(i)].push_back(from_unsorted(mvars, lin));
    }
    auto power_of = [&](int i, int e) -> const Polynomial& {
        auto& pw = powers[static_cast<size_t>(i)];
        while (static_cast<int>(pw.size()) <= e) pw.push_back(pw.back() * pw[1]);
        return pw[static_cast<size_t>(e)];
    };
    Polynomial result(mvars);
    for (const auto& t : terms_) {
        Polynomial mono = constant(mvars, t.coeff);
        for (int i = 0; i < nvars_; ++i) {
            const int e = t.exponents[static_cast<size_t>(i)];
            if (e > 0) mono = mono * power_of(i, e);
        }
        result = result + mono;
    }
    return result;
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
    if (other.nvars_ != nvars_) throw Error(ErrorCode::InvalidArgument, "variable count mismatch");
    std::vector<Term> all = terms_;
    all.insert(all.end(), other.terms_.begin(), other.terms_.end());
    return from_unsorted(nvars_, std::move(all));
}

Polynomial Polynomial::operator-(const Polynomial& other) const { return *this + other * -1.0; }

Polynomial Polynomial::operator*(const Polynomial& other) const {
    if (other.nvars_ != nvars_) throw Error(ErrorCode::InvalidArgument, "variable count mismatch");
    std::vector<Term> out;
    out.reserve(terms_.size() * other.terms_.size());
    for (const auto& a : terms_) {
        for (const auto& b : other.terms_) {
            Term t{a.exponents, a.coeff * b.coeff};
            for (size_t i = 0; i < t.exponents.size(); ++i) t.exponents[i] += b.exponents[i];
            out.push_back(std::move(t));
        }
    }
    return from_unsorted(nvars_, std::move(out));
}

Polynomial Polynomial::operator*(double s) const {
    std::vector<Term> out = terms_;
    for (auto& t : out) t.coeff *= s;
    return from_unsorted(nvars_, std::move(out));
}

}  // namespace graze
