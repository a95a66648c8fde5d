#include <algorithm>
#include <cmath>

#include "graze/error.hpp"
#include "graze/grazing.hpp"

namespace graze {

std::string to_string(RegularityEstimate::Verdict verdict) {
    switch (verdict) {
        case RegularityEstimate::Verdict::Cusp: return "Cusp";
        case RegularityEstimate::Verdict::C1NotC2: return "C1NotC2";
        case RegularityEstimate::Verdict::Smooth: return "Smooth";
        case RegularityEstimate::Verdict::Inconclusive: return "Inconclusive";
    }
    return "Unknown";
}

namespace {

struct GraphPoint {
    double u;
    double v;
};

// Vertices of one branch whose transverse coordinate lies in the fit window,
// plus whether |v| grows monotonically along the branch there.
std::vector<GraphPoint> window_points(const GrazingCurve& curve, const GrazingBranch& br, bool swapped, double lo,
                                      double hi, bool& monotone) {
    std::vector<GraphPoint> pts;
    monotone = true;
    double last = -1.0;
    for (const auto& vx : br.vertices) {
        const double a = vx.x.dot(curve.along);
        const double w = vx.x.dot(curve.transverse);
        const double u = swapped ? w : a;
        const double v = swapped ? a : w;
        const double av = std::abs(v);
        if (av < lo || av > hi) continue;
        if (av <= last) monotone = false;
        last = av;
        pts.push_back({u, v});
    }
    return pts;
}

}  // namespace

RegularityEstimate estimate_regularity(const GrazingCurve& curve, double lo, double hi, int min_points_per_branch) {
    if (curve.branches.empty()) throw Error(ErrorCode::InsufficientPoints, "curve has no branches");
    if (!(lo > 0.0 && hi > lo)) throw Error(ErrorCode::InvalidArgument, "fit window must satisfy 0 < lo < hi");

    RegularityEstimate est;
    struct Candidate {
        std::vector<GraphPoint> points;
        int min_count = std::numeric_limits<int>::max();
        bool monotone = true;
    };
    Candidate cand[2];
    for (int k = 0; k < 2; ++k) {
        for (const auto& br : curve.branches) {
            bool mono = true;
            auto pts = window_points(curve, br, k == 1, lo, hi, mono);
            cand[k].monotone = cand[k].monotone && mono;
            cand[k].min_count = std::min(cand[k].min_count, static_cast<int>(pts.size()));
            cand[k].points.insert(cand[k].points.end(), pts.begin(), pts.end());
        }
    }
    auto usable = [&](const Candidate& c) { return c.monotone && c.min_count >= min_points_per_branch; };
    int pick = 0;
    bool oriented = true;
    if (usable(cand[0])) {
        pick = 0;
    } else if (usable(cand[1])) {
        pick = 1;
    } else {
        oriented = false;
        pick = cand[1].min_count > cand[0].min_count ? 1 : 0;
        if (cand[pick].min_count < min_points_per_branch)
            throw Error(ErrorCode::InsufficientPoints, "fewer than " + std::to_string(min_points_per_branch) +
                                                           " vertices per branch inside the fit window");
    }
    est.swapped = pick == 1;
    const std::vector<GraphPoint>& pooled = cand[pick].points;
    est.points = static_cast<int>(pooled.size());

    std::vector<GraphPoint> nz;
    double usum = 0.0;
    for (const auto& p : pooled) {
        usum += p.u;
        if (p.u != 0.0) nz.push_back(p);
    }
    if (nz.size() < 2) {
        est.exponent = std::numeric_limits<double>::infinity();
        est.coefficient = 0.0;
        est.r_squared = 1.0;
        est.verdict = RegularityEstimate::Verdict::Smooth;
        return est;
    }
    Mat a(static_cast<Eigen::Index>(nz.size()), 2);
    Vec b(static_cast<Eigen::Index>(nz.size()));
    for (size_t i = 0; i < nz.size(); ++i) {
        a(static_cast<Eigen::Index>(i), 0) = std::log(std::abs(nz[i].v));
        a(static_cast<Eigen::Index>(i), 1) = 1.0;
        b(static_cast<Eigen::Index>(i)) = std::log(std::abs(nz[i].u));
    }
    const Vec sol = a.colPivHouseholderQr().solve(b);
    est.exponent = sol(0);
    est.coefficient = (usum < 0.0 ? -1.0 : 1.0) * std::exp(sol(1));
    const Vec res = a * sol - b;
    const double mean = b.mean();
    const double ss_tot = (b.array() - mean).square().sum();
    est.r_squared = ss_tot > 0.0 ? 1.0 - res.squaredNorm() / ss_tot : 1.0;

    // Secondary fit u = sum_{k=1..4} c_k (v/hi)^k on the raw graph.
    Mat p(static_cast<Eigen::Index>(pooled.size()), 4);
    Vec u(static_cast<Eigen::Index>(pooled.size()));
    for (size_t i = 0; i < pooled.size(); ++i) {
        const double tv = pooled[i].v / hi;
        double pw = 1.0;
        for (int k = 0; k < 4; ++k) {
            pw *= tv;
            p(static_cast<Eigen::Index>(i), k) = pw;
        }
        u(static_cast<Eigen::Index>(i)) = pooled[i].u;
    }
    const Vec c = p.colPivHouseholderQr().solve(u);
    const double rms_u = std::sqrt(u.squaredNorm() / static_cast<double>(u.size()));
    const double rms_r = std::sqrt((p * c - u).squaredNorm() / static_cast<double>(u.size()));
    est.poly_fit_residual = rms_u > 0.0 ? rms_r / rms_u : 0.0;

    if (!oriented) {
        est.verdict = RegularityEstimate::Verdict::Inconclusive;
    } else if (est.exponent >= 0.60 && est.exponent <= 0.73) {
        est.verdict = RegularityEstimate::Verdict::Cusp;
    } else if (est.exponent >= 1.26 && est.exponent <= 1.41) {
        est.verdict = RegularityEstimate::Verdict::C1NotC2;
    } else if (est.poly_fit_residual <= 1e-3) {
        est.verdict = RegularityEstimate::Verdict::Smooth;
    } else {
        est.verdict = RegularityEstimate::Verdict::Inconclusive;
    }
    return est;
}

}  // namespace graze
