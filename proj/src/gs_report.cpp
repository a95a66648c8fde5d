#include <cmath>
#include <sstream>

#include "graze/error.hpp"
#include "graze/grazing.hpp"

namespace graze {

std::string to_string(GsVerdict verdict) {
    switch (verdict) {
        case GsVerdict::HoldsSmooth: return "GS-HOLDS-SMOOTH";
        case GsVerdict::HoldsC1Evidence: return "GS-HOLDS-C1-EVIDENCE";
        case GsVerdict::FailsCuspEvidence: return "GS-FAILS-CUSP-EVIDENCE";
        case GsVerdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "UNKNOWN";
}

namespace {

// Central-difference gradient of a grazing function at the apex.
Vec apex_gradient(const GrazingFunction& gf, const Obstacle& obstacle) {
    const int d = obstacle.tangential_dim();
    const double h = 1e-6;
    Vec g(d);
    for (int i = 0; i < d; ++i) {
        Vec xp = Vec::Zero(d), xm = Vec::Zero(d);
        xp(i) = h;
        xm(i) = -h;
        g(i) = (grazing_residual(gf, obstacle, xp) - grazing_residual(gf, obstacle, xm)) / (2.0 * h);
    }
    return g;
}

}  // namespace

GsReport gs_assumption_report(const Obstacle& obstacle, const IncomingPhase& phase, const GsOptions& opt) {
    GsReport rep;
    const int d = obstacle.tangential_dim();
    try {
        rep.order = classify_order(obstacle, phase);
    } catch (const Error& e) {
        rep.basis = "order classification failed";
        rep.notes.push_back(e.what());
        return rep;
    }
    const OrderClassification& ord = *rep.order;
    if (ord.kind == OrderClassification::Kind::Odd) {
        rep.basis = "inflection point at the apex; only diffractive contact is analysed";
        return rep;
    }
    if (ord.gliding) {
        rep.basis = "gliding contact at the apex; only diffractive contact is analysed";
        return rep;
    }

    std::optional<GrazingFunction> gf;
    try {
        gf = GrazingFunction::for_phase(phase, obstacle);
    } catch (const Error& e) {
        rep.basis = "no grazing function for this phase";
        rep.notes.push_back(e.what());
        return rep;
    }

    if (d == 1) {
        const double w = std::min(opt.scan_half_width, obstacle.radius());
        const auto zeros = scan_sign_changes_1d(*gf, obstacle, -w, w);
        rep.scan_zeros = static_cast<int>(zeros.size());
        if (zeros.size() == 1) {
            rep.verdict = GsVerdict::HoldsSmooth;
            rep.basis = "one tangential variable: grazing set is the single point x2 = 0";
        } else {
            rep.basis = "sign-change scan did not find exactly one grazing point";
        }
        return rep;
    }
    if (d != 2) {
        rep.basis = "grazing-curve analysis is implemented for n = 3 only";
        return rep;
    }

    // Exact sufficient conditions settle the verdict without tracing.
    std::optional<GsVerdict> exact;
    if (ord.kind == OrderClassification::Kind::Even && ord.order == 2) {
        exact = GsVerdict::HoldsSmooth;
        rep.basis = "order 2: the grazing function has nonzero gradient at the apex";
        rep.transversality = -2.0 * ord.direction.dot(apex_gradient(*gf, obstacle));
    } else if (obstacle.as_symmetric() && phase.as_spherical()) {
        const GrazingFunction zeta = GrazingFunction::symmetric_zeta(gf->param);
        const Vec gz = apex_gradient(zeta, obstacle);
        rep.transversality = -2.0 * ord.direction.dot(gz);
        if (std::abs(rep.transversality) > 1e-8) {
            exact = GsVerdict::HoldsSmooth;
            rep.basis = "symmetric obstacle: zeta is C1 with transverse gradient at the apex";
        }
    } else if (const auto* poly = obstacle.as_polynomial()) {
        const Polynomial g = Polynomial::constant(2, 1.0) - poly->poly();
        rep.leading_degree = g.min_degree();
        if (rep.leading_degree > 0 && rep.leading_degree % 2 == 0) {
            rep.u1ww = check_u1ww(g.homogeneous_part(rep.leading_degree));
            if (rep.u1ww->pass) {
                exact = GsVerdict::HoldsSmooth;
                rep.basis = "leading homogeneous part has a positive definite Hessian off the origin";
            }
        }
    }

    try {
        rep.curve = trace_grazing_curve(*gf, obstacle, opt.window, opt.trace_tol);
        rep.regularity = estimate_regularity(*rep.curve);
        int diffractive = 0, total = 0;
        for (const auto& br : rep.curve->branches) {
            for (const auto& v : br.vertices) {
                const Vec xi = xi_incoming(phase, obstacle, v.x).xibar;
                ++total;
                if (-xi.dot(obstacle.hess(v.x) * xi) > 0.0) ++diffractive;
            }
        }
        if (total > 0) rep.diffractive_fraction = static_cast<double>(diffractive) / total;
    } catch (const Error& e) {
        rep.notes.push_back(std::string("tracing: ") + e.what());
    }

    bool branching = false;
    if (phase.as_spherical()) {
        for (double x2 : opt.slice_offsets) {
            try {
                const SliceResult s = slice_grazing_count(obstacle, gf->param, x2);
                if (s.count_pos != 1 || s.count_neg != 1) branching = true;
                rep.slices.emplace_back(x2, s);
            } catch (const Error& e) {
                rep.notes.push_back(std::string("slice: ") + e.what());
            }
        }
    }

    if (exact) {
        rep.verdict = *exact;
    } else if (!rep.regularity) {
        rep.basis = "no regularity estimate available";
    } else if (branching) {
        rep.basis = "slice counts differ from (1,1)";
    } else {
        switch (rep.regularity->verdict) {
            case RegularityEstimate::Verdict::Cusp:
                rep.verdict = GsVerdict::FailsCuspEvidence;
                rep.basis = "fitted exponent near 2/3 (cusp)";
                break;
            case RegularityEstimate::Verdict::C1NotC2:
                rep.verdict = GsVerdict::HoldsC1Evidence;
                rep.basis = "fitted exponent near 4/3 (C1 but not C2)";
                break;
            case RegularityEstimate::Verdict::Smooth:
                rep.verdict = GsVerdict::HoldsC1Evidence;
                rep.basis = "traced curve fits a smooth graph";
                break;
            case RegularityEstimate::Verdict::Inconclusive:
                rep.basis = "regularity fit is ambiguous";
                break;
        }
    }
    if (rep.verdict == GsVerdict::HoldsC1Evidence || rep.verdict == GsVerdict::FailsCuspEvidence)
        rep.notes.push_back("verdict is numerical evidence from a traced curve, not a proof");
    rep.notes.push_back("diffractivity of nearby grazing points is checked on traced vertices only");
    return rep;
}

}  // namespace graze
