#pragma once

#include <Eigen/Core>

namespace bearing {

// Relative threshold for numerical rank: sigma_i counts iff
// sigma_i > kRankTolerance * sigma_max.
inline constexpr double kRankTolerance = 1e-8;
// Absolute distance below which two adjacent nodes count as collocated.
inline constexpr double kCollocationTolerance = 1e-9;

struct SpectralRank {
  int rank = 0;
  Eigen::VectorXd singular_values;  // descending
  Eigen::MatrixXd right_vectors;    // columns pair with singular_values, then the rest
};

// Full SVD of `a` with the scale-invariant rank rule; sigma_max == 0 gives 0.
SpectralRank spectral_rank(const Eigen::MatrixXd& a, double tau = kRankTolerance);
int numeric_rank(const Eigen::MatrixXd& a, double tau = kRankTolerance);

// Orthonormal basis for range(a) (columns), using the same rank rule.
Eigen::MatrixXd orthonormal_range(const Eigen::MatrixXd& a, double tau = kRankTolerance);

// Orthonormal basis for the numerical null space of a.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, double tau = kRankTolerance);

// Skew-symmetric matrix [x]_x with [x]_x y = x cross y.
Eigen::Matrix3d skew(const Eigen::Vector3d& x);

}  // namespace bearing
