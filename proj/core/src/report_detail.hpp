#pragma once

#include <optional>

#include <Eigen/Core>

#include "bearing/linalg.hpp"
#include "bearing/rigidity.hpp"

namespace bearing::detail {

std::optional<Eigen::VectorXd> nontrivial_witness(const SpectralRank& sr,
                                                  const Eigen::MatrixXd& trivial_orthonormal);

RigidityReport make_report(const Eigen::MatrixXd& matrix, int expected_rank,
                           const Eigen::MatrixXd& trivial_orthonormal);

}  // namespace bearing::detail
