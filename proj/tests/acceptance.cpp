// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "graze/cli.hpp"
#include "graze/error.hpp"
#include "graze/grazing.hpp"
#include "graze/linalg.hpp"
#include "graze/reflection.hpp"
#include "support.hpp"

using namespace graze;
using testing::Rng;
using testing::vec;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double time_limit;  // seconds; 0 means none
    std::function<Outcome()> run;
};

std::string num(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

// The five worked polynomial examples with their apex-grazing phases.
struct Example {
    std::string name;
    Obstacle obstacle;
    IncomingPhase phase;
};

std::vector<Example> worked_examples() {
    return {
        {"u4+v2", testing::cusp(), testing::apex_source()},
        {"u4+u2v2+v2", testing::cusp_mixed(), testing::apex_source()},
        {"u4+v4", testing::quartic(), testing::apex_source()},
        {"u4+2u2v2+uv2+v2", testing::planar_cusp(), testing::plane_x2()},
        {"u4+uv4+u2v4+v2", testing::planar_c1(), testing::plane_x2()},
    };
}

Vec illuminated_point(Rng& rng, const Obstacle& f, const IncomingPhase& ph, double radius, double min_margin) {
    for (;;) {
        const Vec x = rng.in_ball(f.tangential_dim(), radius);
        if (classify_boundary_point(f, ph, x).margin > min_margin) return x;
    }
}

IncomingPhase random_phase(Rng& rng) {
    switch (rng.integer(0, 2)) {
        case 0: return IncomingPhase::spherical(vec({rng.uniform(1.2, 2.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)}));
        case 1: return IncomingPhase::plane(rng.unit(3));
        default: return IncomingPhase::convex_distance(vec({rng.uniform(1.5, 2.5), rng.uniform(-3, 3), 0.0}), 0.4);
    }
}

Outcome reflection_identities() {
    Rng rng(1001);
    std::vector<Obstacle> obstacles = {testing::sphere()};
    for (const auto& e : worked_examples()) obstacles.push_back(e.obstacle);
    double norm_err = 0, tangent_err = 0, normal_err = 0, involution_err = 0;
    for (int k = 0; k < 10000; ++k) {
        const Obstacle& f = obstacles[static_cast<size_t>(rng.integer(0, static_cast<int>(obstacles.size()) - 1))];
        const Vec x = rng.in_ball(2, 0.5);
        const IncomingPhase ph = random_phase(rng);
        const Vec g = grad_F(f, x);
        const BoundaryCovector xi = xi_incoming(ph, f, x);
        const BoundaryCovector r = reflect_direction(f, x, xi);
        norm_err = std::max(norm_err, std::abs(r.full().norm() - 1.0));
        tangent_err = std::max(tangent_err, (xi.xi1 * g + xi.xibar - (r.xi1 * g + r.xibar)).cwiseAbs().maxCoeff());
        normal_err = std::max(normal_err, std::abs(reflection_margin(g, r) + reflection_margin(g, xi)));
        involution_err = std::max(involution_err, (reflect_direction(f, x, r).full() - xi.full()).cwiseAbs().maxCoeff());
    }
    const double worst = std::max({norm_err, tangent_err, normal_err, involution_err});
    return {worst <= 1e-12, "10000 samples; max errors: unit " + num(norm_err) + ", tangential " + num(tangent_err) +
                                ", normal " + num(normal_err) + ", involution " + num(involution_err)};
}

Outcome jacobian_consistency() {
    Rng rng(1002);
    const Obstacle f = testing::sphere();
    const IncomingPhase ph = testing::apex_source();
    double worst_rel = 0, worst_bound = INFINITY;
    for (int k = 0; k < 1000; ++k) {
        const Vec x = illuminated_point(rng, f, ph, 0.5, 1e-3);
        const double s = rng.uniform(0, 1);
        const JacobianReport r = jacobian_analytic(f, ph, s, x);
        const double jfd = jacobian_fd(f, ph, s, x, rng.uniform(-1, 1));
        worst_rel = std::max(worst_rel, std::abs(r.j_analytic - jfd) / std::abs(jfd));
        // Bound 2(<grad F, alphabar> - alpha1) with alpha the incoming unit direction.
        const Vec alpha = xi_incoming(ph, f, x).full();
        const double bound = 2.0 * (grad_F(f, x).dot(alpha.tail(2)) - alpha(0));
        worst_bound = std::min(worst_bound, r.j_analytic - bound);
    }
    return {worst_rel <= 1e-6 && worst_bound >= -1e-9,
            "1000 samples (margin > 1e-3); max relative error " + num(worst_rel) + ", min j - bound " + num(worst_bound)};
}

Outcome btk_forms() {
    Rng rng(1003);
    double closed_err = 0;
    for (int k = 0; k < 1000; ++k) {
        const Obstacle f = (k % 2 == 0) ? testing::sphere() : testing::cusp_mixed();
        const Vec b = vec({rng.uniform(1.2, 2.0), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)});
        const IncomingPhase ph = IncomingPhase::spherical(b);
        const Vec x = illuminated_point(rng, f, ph, 0.5, 1e-6);
        const JacobianReport r = jacobian_analytic(f, ph, rng.uniform(0, 1), x);
        const Vec p = boundary_point(f, x);
        const double rho = (p - b).norm();
        const Vec alpha = (p - b) / rho;
        const Vec g = grad_F(f, x);
        const Vec w = alpha(0) * g + alpha.tail(2);
        const Mat closed = (Mat::Identity(2, 2) + g * g.transpose() - w * w.transpose()) / rho;
        closed_err = std::max(closed_err, (r.BtK - closed).cwiseAbs().maxCoeff());
    }
    double general_err = 0, min_eig = INFINITY;
    const IncomingPhase distance = IncomingPhase::convex_distance(vec({1, -3, 0}), 2.0);
    for (int k = 0; k < 1000; ++k) {
        const Obstacle f = (k % 2 == 0) ? testing::quartic_mixed() : testing::cusp();
        const Vec x = illuminated_point(rng, f, distance, 0.5, 1e-6);
        const JacobianReport r = jacobian_analytic(f, distance, rng.uniform(0, 1), x);
        const Mat psi = boundary_trace_hessian(distance, f, x) - xi_incoming(distance, f, x).xi1 * hess_F(f, x);
        general_err = std::max(general_err, (r.BtK - psi).cwiseAbs().maxCoeff());
        min_eig = std::min(min_eig, min_symmetric_eigenvalue(r.BtK));
    }
    return {closed_err <= 1e-10 && general_err <= 1e-9 && min_eig >= -1e-8,
            "closed form error " + num(closed_err) + "; general-phase error " + num(general_err) +
                ", min eigenvalue " + num(min_eig)};
}

Outcome flow_round_trip() {
    Rng rng(1004);
    const Obstacle f = testing::sphere();
    const IncomingPhase ph = testing::apex_source();
    InvertOptions opt;
    opt.radius = 0.5;
    double worst = 0;
    for (int k = 0; k < 1000; ++k) {
        const Vec x = illuminated_point(rng, f, ph, 0.5, 1e-3);
        const double s = rng.uniform(0.01, 1);
        const double t = rng.uniform(-1, 1);
        const FlowPreimage pre = invert_flow(f, ph, flow_map(f, ph, s, x, t).y, std::nullopt, opt);
        worst = std::max({worst, std::abs(pre.s - s), (pre.xbar - x).cwiseAbs().maxCoeff(), std::abs(pre.t - t)});
    }
    double grad_drift = 0;
    for (int k = 0; k < 100; ++k) {
        const Vec x = illuminated_point(rng, f, ph, 0.5, 1e-2);
        const double t = rng.uniform(-1, 1);
        const Vec g0 = reflected_phase_at(f, ph, flow_map(f, ph, rng.uniform(0.01, 0.5), x, t).y, std::nullopt, opt).gradient;
        const Vec g1 = reflected_phase_at(f, ph, flow_map(f, ph, rng.uniform(0.5, 1.0), x, t).y, std::nullopt, opt).gradient;
        grad_drift = std::max(grad_drift, (g0 - g1).cwiseAbs().maxCoeff());
    }
    return {worst <= 1e-8 && grad_drift <= 1e-10,
            "1000 round trips, max error " + num(worst) + "; phase gradient drift along 100 rays " + num(grad_drift)};
}

Outcome regularity_case(const Obstacle& f, const IncomingPhase& ph, double lo, double hi, double expected) {
    const GrazingCurve c = trace_grazing_curve(GrazingFunction::for_phase(ph, f), f, 0.1);
    const RegularityEstimate r = estimate_regularity(c);
    const double rel = std::abs(r.coefficient - expected) / std::abs(expected);
    return {r.exponent >= lo && r.exponent <= hi && rel <= 0.05,
            "exponent " + num(r.exponent) + " (bin [" + num(lo) + ", " + num(hi) + "]), coefficient " +
                num(r.coefficient) + " vs " + num(expected) + " (rel " + num(rel) + ")"};
}

Outcome relocated_source() {
    const Obstacle f = testing::cusp();
    const GrazingCurve c = trace_grazing_curve(GrazingFunction::for_phase(IncomingPhase::spherical(vec({1, 0, 1})), f),
                                               f, 0.2);
    double literal = 0, root = 0;
    int n = 0;
    for (const auto& br : c.branches) {
        for (const auto& v : br.vertices) {
            const double u = v.x(0);
            if (std::abs(u) > 0.2) continue;
            const double q = std::pow(u, 4);
            literal = std::max(literal, std::abs(v.x(1) - (2.0 - std::sqrt(4.0 - 12.0 * q))));
            root = std::max(root, std::abs(v.x(1) - (1.0 - std::sqrt(1.0 - 3.0 * q))));
            ++n;
        }
    }
    return {n > 0 && literal <= 1e-8, std::to_string(n) + " vertices; max deviation from v = 2 - sqrt(4 - 12u^4) " +
                                          num(literal) + "; from the root 1 - sqrt(1 - 3u^4) of 3u^4 + v^2 - 2v " +
                                          num(root)};
}

Outcome order_classifier() {
    std::vector<Example> cases = worked_examples();
    cases.push_back({"sphere", testing::sphere(), testing::apex_source()});
    const std::vector<int> expected = {4, 4, 4, 4, 4, 2};
    bool ok = true;
    std::string detail = "orders";
    for (size_t i = 0; i < cases.size(); ++i) {
        const OrderClassification c = classify_order(cases[i].obstacle, cases[i].phase);
        detail += " " + std::to_string(c.order) + (c.diffractive ? "d" : "");
        ok = ok && c.kind == OrderClassification::Kind::Even && c.order == expected[i] && c.diffractive;
        // Exact polynomials: every coefficient below the order is exactly zero.
        for (int j = 0; j + 1 < c.order; ++j) ok = ok && c.taylor[static_cast<size_t>(j)] == 0.0;
    }
    const Obstacle flat = Obstacle::symmetric(HProfile::exp_flat(), Mat::Identity(2, 2));
    const OrderClassification e = classify_order(flat, IncomingPhase::spherical(vec({1, -0.6, 0.8})));
    bool flat_ok = e.kind == OrderClassification::Kind::AtLeast && e.order == 16;
    for (double t : e.taylor) flat_ok = flat_ok && t == 0.0;
    detail += "; exp-flat " + e.describe();
    return {ok && flat_ok, detail};
}

// Smallest Hessian eigenvalue of c0 u^4 + c1 u^2 v^2 + c2 v^4 on the unit circle, by hand.
double brute_min_eigenvalue(double c0, double c1, double c2, int samples) {
    double best = INFINITY;
    for (int i = 0; i < samples; ++i) {
        const double a = 2.0 * M_PI * i / samples;
        const double u = std::cos(a), w = std::sin(a);
        const double huu = 12 * c0 * u * u + 2 * c1 * w * w;
        const double hww = 12 * c2 * w * w + 2 * c1 * u * u;
        const double huw = 4 * c1 * u * w;
        best = std::min(best, 0.5 * (huu + hww) - std::sqrt(0.25 * (huu - hww) * (huu - hww) + huw * huw));
    }
    return best;
}

Outcome u1ww_check() {
    const U1wwVerdict base = check_u1ww(testing::poly2({{1, 4, 0}, {1, 2, 2}, {1, 0, 4}}));
    const U1wwVerdict flat = check_u1ww(testing::poly2({{1, 4, 0}, {1, 0, 4}}));
    const bool flat_at_axis = std::abs(flat.argmin(1)) <= 1e-12 || std::abs(flat.argmin(0)) <= 1e-12;
    Rng rng(1010);
    int agree = 0, passes = 0;
    for (int k = 0; k < 20; ++k) {
        const double c0 = rng.uniform(0.01, 2), c1 = rng.uniform(0.01, 2), c2 = rng.uniform(0.01, 2);
        const U1wwVerdict v = check_u1ww(testing::poly2({{c0, 4, 0}, {c1, 2, 2}, {c2, 0, 4}}));
        const bool brute = brute_min_eigenvalue(c0, c1, c2, 36000) > 0.0;
        agree += (v.pass == brute);
        passes += v.pass;
    }
    const bool ok = base.pass && !flat.pass && flat_at_axis && agree == 20;
    return {ok, std::string("u4+u2v2+v4 ") + (base.pass ? "PASS" : "FAIL") + "; u4+v4 " +
                    (flat.pass ? "PASS" : "FAIL") + " with min eigenvalue " + num(flat.min_eigenvalue) + " at (" +
                    num(flat.argmin(0)) + ", " + num(flat.argmin(1)) + "); random cases agree " +
                    std::to_string(agree) + "/20 (" + std::to_string(passes) + " PASS)"};
}

Outcome slice_counts() {
    const std::vector<Obstacle> obstacles = {testing::quartic_mixed(), testing::cusp()};
    bool ok = true;
    std::string detail;
    for (const Obstacle& f : obstacles) {
        for (double x2 : {-0.1, -0.05, -0.02, -0.01}) {
            const SliceResult r = slice_grazing_count(f, vec({-1, 0}), x2);
            ok = ok && r.count_pos == 1 && r.count_neg == 1;
            detail += "(" + std::to_string(r.count_pos) + "," + std::to_string(r.count_neg) + ")";
        }
        if (&f != &obstacles.back()) detail += " ";
    }
    return {ok, "counts " + detail};
}

Outcome planar_uniqueness() {
    const GrazingFunction h = GrazingFunction::spherical_h(vec({-1}));
    std::vector<std::string> parts;
    bool ok = true;
    for (int k : {2, 1}) {
        const Obstacle f = Obstacle::polynomial(testing::poly1({{1, 0}, {-1, 2 * k}}));
        const std::vector<double> roots = scan_sign_changes_1d(h, f, -0.3, 0.3);
        ok = ok && roots.size() == 1 && std::abs(roots[0]) <= 1e-12;
        std::string part = "1-x^" + std::to_string(2 * k) + ": " + std::to_string(roots.size()) + " sign change(s)";
        if (!roots.empty()) part += " at " + num(roots[0]);
        parts.push_back(part);
    }
    return {ok, parts[0] + "; " + parts[1]};
}

Outcome trace_determinism() {
    const fs::path root = fs::temp_directory_path() / "graze_acceptance_determinism";
    fs::remove_all(root);
    std::vector<std::string> outputs;
    for (const char* run : {"a", "b"}) {
        const fs::path dir = root / run;
        const std::string cmd = std::string("\"") + GRAZE_CLI_PATH + "\" trace --obstacle \"" GRAZE_SPECS_DIR
                                "/cusp.obstacle\" --phase \"" GRAZE_SPECS_DIR "/source_apex.phase\" --out \"" +
                                dir.string() + "\" > /dev/null";
        if (std::system(cmd.c_str()) != 0) return {false, "trace command failed"};
        std::ifstream in(dir / "trace.csv", std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        outputs.push_back(os.str());
    }
    const bool same = outputs[0] == outputs[1] && !outputs[0].empty();
    return {same, "two runs, " + std::to_string(outputs[0].size()) + " bytes each, " +
                      (same ? "identical" : "different")};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "reflection identity suite", 10, reflection_identities},
        {2, "jacobian consistency", 30, jacobian_consistency},
        {3, "B^T K forms", 0, btk_forms},
        {4, "flow-map round trip", 0, flow_round_trip},
        {5, "cusp exponent 2/3", 5,
         [] { return regularity_case(testing::cusp(), testing::apex_source(), 0.63, 0.70, -std::pow(4.0, -1.0 / 3.0)); }},
        {6, "exponent 4/3, spherical source", 0,
         [] { return regularity_case(testing::quartic(), testing::apex_source(), 1.28, 1.38, -std::cbrt(0.75)); }},
        {7, "exponent 4/3, plane wave", 0,
         [] { return regularity_case(testing::planar_c1(), testing::plane_x2(), 1.28, 1.38, std::pow(4.0, -1.0 / 3.0)); }},
        {8, "smooth curve from a relocated source", 0, relocated_source},
        {9, "order classifier", 0, order_classifier},
        {10, "u1ww hypothesis check", 0, u1ww_check},
        {11, "no-branching slice counts", 0, slice_counts},
        {12, "2D grazing uniqueness", 0, planar_uniqueness},
        {13, "trace determinism", 0, trace_determinism},
    };
    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit > 0 && secs > c.time_limit) {
            o.pass = false;
            o.detail += "; over the " + num(c.time_limit) + " s limit";
        }
        failures += !o.pass;
        char timing[32];
        std::snprintf(timing, sizeof timing, "%.2f s", secs);
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << " [" << timing << "]: " << o.detail
                  << "\n";
    }
    std::cout << (criteria.size() - static_cast<size_t>(failures)) << "/" << criteria.size() << " criteria passed\n";
    return failures == 0 ? 0 : 1;
}
