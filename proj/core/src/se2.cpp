#include <algorithm>
#include <cmath>
#include <numbers>

#include "bearing/errors.hpp"
#include "bearing/rigidity.hpp"
#include "report_detail.hpp"

namespace bearing {

double wrap_angle(double theta) {
  double w = std::remainder(theta, 2.0 * std::numbers::pi);
  if (w <= -std::numbers::pi) w += 2.0 * std::numbers::pi;
  return w;
}

SE2Network::SE2Network(int n, std::vector<Arc> arcs, Eigen::VectorXd positions,
                       Eigen::VectorXd headings)
    : n_(n), p_(std::move(positions)), psi_(std::move(headings)) {
  if (n_ < 2) throw InputError("SE(2) network needs at least two nodes");
  if (p_.size() != 2 * n_) throw InputError("SE(2) positions must have 2n entries");
  if (psi_.size() != n_) throw InputError("SE(2) headings must have n entries");
  if (!p_.allFinite() || !psi_.allFinite()) throw InputError("SE(2) configuration is not finite");
  for (Eigen::Index i = 0; i < psi_.size(); ++i) psi_(i) = wrap_angle(psi_(i));
  for (const Arc& a : arcs) {
    if (a.tail < 0 || a.tail >= n_ || a.head < 0 || a.head >= n_) {
      throw InputError("arc (" + std::to_string(a.tail) + ", " + std::to_string(a.head) +
                       ") references a missing node");
    }
    if (a.tail == a.head) throw InputError("self-loop at node " + std::to_string(a.tail));
    if (std::find(arcs_.begin(), arcs_.end(), a) != arcs_.end()) continue;
    const double dist = (p_.segment<2>(2 * a.head) - p_.segment<2>(2 * a.tail)).norm();
    if (dist <= kCollocationTolerance) throw CollocationError(a.tail, a.head, dist);
    arcs_.push_back(a);
  }
}

namespace {

// Transpose of the planar rotation by psi: maps global vectors into the body frame.
Eigen::Matrix2d body_rotation(double psi) {
  Eigen::Matrix2d r;
  r << std::cos(psi), std::sin(psi),
       -std::sin(psi), std::cos(psi);
  return r;
}

Eigen::Matrix2d body_rotation_derivative(double psi) {
  Eigen::Matrix2d r;
  r << -std::sin(psi), std::cos(psi),
       -std::cos(psi), -std::sin(psi);
  return r;
}

}  // namespace

Eigen::VectorXd se2_bearing_function(const SE2Network& net) {
  Eigen::VectorXd out(2 * net.num_arcs());
  const auto& p = net.positions();
  for (int k = 0; k < net.num_arcs(); ++k) {
    const Arc& a = net.arcs()[k];
    const Eigen::Vector2d e = p.segment<2>(2 * a.head) - p.segment<2>(2 * a.tail);
    out.segment<2>(2 * k) = body_rotation(net.headings()(a.tail)) * (e / e.norm());
  }
  return out;
}

Eigen::MatrixXd se2_rigidity_matrix(const SE2Network& net) {
  const int n = net.num_nodes();
  const auto& p = net.positions();
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(2 * net.num_arcs(), 3 * n);
  for (int k = 0; k < net.num_arcs(); ++k) {
    const Arc& a = net.arcs()[k];
    const Eigen::Vector2d e = p.segment<2>(2 * a.head) - p.segment<2>(2 * a.tail);
    const double len = e.norm();
    const Eigen::Vector2d g = e / len;
    const Eigen::Matrix2d proj = Eigen::Matrix2d::Identity() - g * g.transpose();
    const double psi = net.headings()(a.tail);
    const Eigen::Matrix2d dp = body_rotation(psi) * proj / len;
    r.block<2, 2>(2 * k, 2 * a.head) += dp;
    r.block<2, 2>(2 * k, 2 * a.tail) -= dp;
    r.block<2, 1>(2 * k, 2 * n + a.tail) = body_rotation_derivative(psi) * g;
  }
  return r;
}

Eigen::MatrixXd se2_trivial_motions(const SE2Network& net) {
  const int n = net.num_nodes();
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(3 * n, 4);
  const auto& p = net.positions();
  for (int i = 0; i < n; ++i) {
    t(2 * i, 0) = 1.0;
    t(2 * i + 1, 1) = 1.0;
    t.block<2, 1>(2 * i, 2) = p.segment<2>(2 * i);
    // p_perp = Rot(pi/2) p_i.
    t(2 * i, 3) = -p(2 * i + 1);
    t(2 * i + 1, 3) = p(2 * i);
    t(2 * n + i, 3) = 1.0;
  }
  return t;
}

RigidityReport is_se2_infinitesimally_rigid(const SE2Network& net) {
  return detail::make_report(se2_rigidity_matrix(net), 3 * net.num_nodes() - 4,
                             orthonormal_range(se2_trivial_motions(net)));
}

}  // namespace bearing
