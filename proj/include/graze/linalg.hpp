#pragma once

#include <Eigen/Dense>

namespace graze {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Rank-one update helpers for I + a b^T. The inverse requires 1 + <a,b> != 0.
double det_identity_plus_rank_one(const Vec& a, const Vec& b);
Mat inverse_identity_plus_rank_one(const Vec& a, const Vec& b);

// Smallest eigenvalue of the symmetric part of m.
double min_symmetric_eigenvalue(const Mat& m);

}  // namespace graze
