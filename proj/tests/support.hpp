#pragma once

#include <cmath>
#include <initializer_list>
#include <random>
#include <tuple>
#include <vector>

#include "graze/obstacle.hpp"
#include "graze/phase.hpp"
#include "graze/polynomial.hpp"

namespace testing {

using graze::Mat;
using graze::Obstacle;
using graze::Polynomial;
using graze::Vec;

// Deterministic generator wrapper used by the property tests.
class Rng {
public:
    explicit Rng(unsigned long long seed) : gen_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

    Vec vec(int n, double lo, double hi) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v(i) = uniform(lo, hi);
        return v;
    }

    Vec unit(int n) {
        Vec v(n);
        do {
            for (int i = 0; i < n; ++i) v(i) = std::normal_distribution<double>()(gen_);
        } while (v.norm() < 1e-3);
        return v / v.norm();
    }

    // Uniform point in the closed ball of the given radius.
    Vec in_ball(int n, double radius) {
        Vec v;
        do {
            v = vec(n, -radius, radius);
        } while (v.norm() > radius);
        return v;
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

// Polynomial in (u, v) from (coefficient, exponent of u, exponent of v) triples.
inline Polynomial poly2(std::initializer_list<std::tuple<double, int, int>> terms) {
    std::vector<graze::Term> t;
    for (const auto& [c, a, b] : terms) t.push_back({{a, b}, c});
    return Polynomial(2, t);
}

inline Polynomial poly1(std::initializer_list<std::pair<double, int>> terms) {
    std::vector<graze::Term> t;
    for (const auto& [c, a] : terms) t.push_back({{a}, c});
    return Polynomial(1, t);
}

// F = 1 - G for the given G(u, v).
inline Obstacle one_minus(std::initializer_list<std::tuple<double, int, int>> g, double radius = 1.0) {
    std::vector<graze::Term> t{{{0, 0}, 1.0}};
    for (const auto& [c, a, b] : g) t.push_back({{a, b}, -c});
    return Obstacle::polynomial(Polynomial(2, t), radius);
}

inline Obstacle sphere() { return one_minus({{1, 2, 0}, {1, 0, 2}}); }
inline Obstacle cusp() { return one_minus({{1, 4, 0}, {1, 0, 2}}); }
inline Obstacle cusp_mixed() { return one_minus({{1, 4, 0}, {1, 2, 2}, {1, 0, 2}}); }
inline Obstacle quartic() { return one_minus({{1, 4, 0}, {1, 0, 4}}); }
inline Obstacle quartic_mixed() { return one_minus({{1, 4, 0}, {1, 2, 2}, {1, 0, 4}}); }
inline Obstacle planar_cusp() { return one_minus({{1, 4, 0}, {2, 2, 2}, {1, 1, 2}, {1, 0, 2}}); }
inline Obstacle planar_c1() { return one_minus({{1, 4, 0}, {1, 1, 4}, {1, 2, 4}, {1, 0, 2}}); }

inline Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

inline graze::IncomingPhase apex_source() { return graze::IncomingPhase::spherical(vec({1, -1, 0})); }
inline graze::IncomingPhase plane_x2() { return graze::IncomingPhase::plane(vec({0, 1, 0})); }

// Central-difference gradient of a scalar function.
template <class Fn>
Vec fd_gradient(Fn&& f, const Vec& x, double h) {
    Vec g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Vec xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        g(i) = (f(xp) - f(xm)) / (2 * h);
    }
    return g;
}

// Specular mirror of v across the plane with normal n (any length).
inline Vec mirror(const Vec& v, const Vec& n) {
    const Vec u = n / n.norm();
    return v - 2.0 * v.dot(u) * u;
}

}  // namespace testing
