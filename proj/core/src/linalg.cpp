#include "bearing/linalg.hpp"

#include <Eigen/SVD>

namespace bearing {

SpectralRank spectral_rank(const Eigen::MatrixXd& a, double tau) {
  SpectralRank out;
  if (a.size() == 0) {
    out.right_vectors = Eigen::MatrixXd::Identity(a.cols(), a.cols());
    return out;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  out.singular_values = svd.singularValues();
  out.right_vectors = svd.matrixV();
  const double sigma_max = out.singular_values.size() > 0 ? out.singular_values(0) : 0.0;
  if (sigma_max > 0.0) {
    for (Eigen::Index i = 0; i < out.singular_values.size(); ++i) {
      if (out.singular_values(i) > tau * sigma_max) ++out.rank;
    }
  }
  return out;
}

int numeric_rank(const Eigen::MatrixXd& a, double tau) { return spectral_rank(a, tau).rank; }

Eigen::MatrixXd orthonormal_range(const Eigen::MatrixXd& a, double tau) {
  if (a.size() == 0) return Eigen::MatrixXd(a.rows(), 0);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  int rank = 0;
  if (s.size() > 0 && s(0) > 0.0) {
    while (rank < s.size() && s(rank) > tau * s(0)) ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, double tau) {
  const SpectralRank sr = spectral_rank(a, tau);
  return sr.right_vectors.rightCols(a.cols() - sr.rank);
}

Eigen::Matrix3d skew(const Eigen::Vector3d& x) {
  Eigen::Matrix3d s;
  s << 0.0, -x(2), x(1),
       x(2), 0.0, -x(0),
       -x(1), x(0), 0.0;
  return s;
}

}  // namespace bearing
