#include "graze/linalg.hpp"

namespace graze {

double det_identity_plus_rank_one(const Vec& a, const Vec& b) { return 1.0 + a.dot(b); }

Mat inverse_identity_plus_rank_one(const Vec& a, const Vec& b) {
    const double denom = 1.0 + a.dot(b);
    return Mat::Identity(a.size(), a.size()) - (a * b.transpose()) / denom;
}

double min_symmetric_eigenvalue(const Mat& m) {
    if (m.size() == 0) return 0.0;
    const Mat sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> solver(sym, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

}  // namespace graze
