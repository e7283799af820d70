#include "bearing/localization.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "bearing/errors.hpp"

namespace bearing {

namespace {

Eigen::VectorXd gather(const Eigen::VectorXd& p, const std::vector<int>& nodes, int d) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(nodes.size()) * d);
  for (std::size_t s = 0; s < nodes.size(); ++s) {
    out.segment(static_cast<Eigen::Index>(s) * d, d) = p.segment(nodes[s] * d, d);
  }
  return out;
}

Eigen::MatrixXd sub_block(const Eigen::MatrixXd& lap, const std::vector<int>& rows,
                          const std::vector<int>& cols, int d) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()) * d,
                      static_cast<Eigen::Index>(cols.size()) * d);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      out.block(static_cast<Eigen::Index>(r) * d, static_cast<Eigen::Index>(c) * d, d, d) =
          lap.block(rows[r] * d, cols[c] * d, d, d);
    }
  }
  return out;
}

}  // namespace

AnchoredNetwork::AnchoredNetwork(Network net, std::vector<int> anchors)
    : net_(std::move(net)), bearings_(bearing_function(net_)) {
  init_roles(std::move(anchors));
}

AnchoredNetwork::AnchoredNetwork(Network net, std::vector<int> anchors,
                                 Eigen::VectorXd measured_bearings)
    : net_(std::move(net)), bearings_(std::move(measured_bearings)), from_truth_(false) {
  const int d = net_.dimension();
  if (bearings_.size() != static_cast<Eigen::Index>(net_.num_edges()) * d) {
    throw InputError("measured bearings must have one d-vector per edge");
  }
  for (int k = 0; k < net_.num_edges(); ++k) {
    auto block = bearings_.segment(k * d, d);
    const double norm = block.norm();
    if (!(norm > kCollocationTolerance)) throw InputError("measured bearing " + std::to_string(k) + " is zero");
    block /= norm;
  }
  init_roles(std::move(anchors));
}

void AnchoredNetwork::init_roles(std::vector<int> anchors) {
  std::sort(anchors.begin(), anchors.end());
  anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());
  for (int a : anchors) {
    if (a < 0 || a >= net_.num_nodes()) throw InputError("anchor " + std::to_string(a) + " does not exist");
  }
  anchors_ = std::move(anchors);
  for (int i = 0; i < net_.num_nodes(); ++i) {
    if (!std::binary_search(anchors_.begin(), anchors_.end(), i)) followers_.push_back(i);
  }
  laplacian_ = bearing_laplacian(net_.graph(), net_.dimension(), bearings_);
}

Eigen::VectorXd AnchoredNetwork::anchor_positions() const {
  return gather(net_.positions(), anchors_, dimension());
}

Eigen::VectorXd AnchoredNetwork::follower_positions() const {
  return gather(net_.positions(), followers_, dimension());
}

LaplacianPartition partition_laplacian(const AnchoredNetwork& an) {
  if (an.anchors().empty()) throw InputError("Laplacian partition needs at least one anchor");
  const int d = an.dimension();
  const auto& lap = an.laplacian();
  LaplacianPartition part;
  part.anchors = an.anchors();
  part.followers = an.followers();
  part.d = d;
  part.aa = sub_block(lap, part.anchors, part.anchors, d);
  part.af = sub_block(lap, part.anchors, part.followers, d);
  part.fa = sub_block(lap, part.followers, part.anchors, d);
  part.ff = sub_block(lap, part.followers, part.followers, d);
  return part;
}

LocalizabilityReport is_bearing_localizable(const AnchoredNetwork& an) {
  LocalizabilityReport rep;
  const int d = an.dimension();
  rep.num_anchors = static_cast<int>(an.anchors().size());
  const SpectralRank full = spectral_rank(an.laplacian());
  rep.laplacian_nullity = static_cast<int>(an.laplacian().cols()) - full.rank;
  rep.anchor_bound = static_cast<double>(rep.laplacian_nullity) / d;
  rep.anchor_bound_satisfied = rep.num_anchors >= rep.anchor_bound;

  if (an.anchors().empty()) {
    rep.anchor_free_motion = true;
    return rep;
  }
  if (an.followers().empty()) {
    rep.localizable = true;
    return rep;
  }
  const LaplacianPartition part = partition_laplacian(an);
  const SpectralRank ff = spectral_rank(part.ff);
  rep.sigma_max = ff.singular_values(0);
  rep.sigma_min = ff.singular_values(ff.singular_values.size() - 1);
  rep.localizable = rep.sigma_max > 0.0 && rep.sigma_min > kRankTolerance * rep.sigma_max;
  rep.anchor_free_motion = !rep.localizable;
  if (rep.anchor_free_motion) {
    rep.anchor_free_witness = ff.right_vectors.col(ff.right_vectors.cols() - 1);
  }
  return rep;
}

LocalizationSolution solve_localization(const AnchoredNetwork& an,
                                        const Eigen::VectorXd& anchor_positions) {
  const LocalizabilityReport loc = is_bearing_localizable(an);
  if (!loc.localizable) {
    throw InfeasibleError("network is not bearing localizable: L_ff is singular (n_a = " +
                          std::to_string(loc.num_anchors) + ", dim Null(L)/d = " +
                          std::to_string(loc.anchor_bound) + ")");
  }
  if (anchor_positions.size() != static_cast<Eigen::Index>(an.anchors().size()) * an.dimension()) {
    throw InputError("anchor position vector has the wrong size");
  }
  LocalizationSolution sol;
  if (an.followers().empty()) {
    sol.objective = localization_objective(an, assemble_estimate(an, Eigen::VectorXd(0), anchor_positions));
    return sol;
  }
  const LaplacianPartition part = partition_laplacian(an);
  const Eigen::LLT<Eigen::MatrixXd> llt(part.ff);
  if (llt.info() != Eigen::Success) {
    throw InfeasibleError("L_ff is not numerically positive definite");
  }
  sol.followers = llt.solve(-part.fa * anchor_positions);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(part.ff, Eigen::EigenvaluesOnly);
  sol.condition_number = eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff();
  sol.objective = localization_objective(an, assemble_estimate(an, sol.followers, anchor_positions));
  return sol;
}

LocalizationSolution solve_localization(const AnchoredNetwork& an) {
  return solve_localization(an, an.anchor_positions());
}

Eigen::VectorXd assemble_estimate(const AnchoredNetwork& an, const Eigen::VectorXd& followers,
                                  const Eigen::VectorXd& anchor_positions) {
  const int d = an.dimension();
  Eigen::VectorXd x(static_cast<Eigen::Index>(an.network().num_nodes()) * d);
  for (std::size_t s = 0; s < an.anchors().size(); ++s) {
    x.segment(an.anchors()[s] * d, d) = anchor_positions.segment(static_cast<Eigen::Index>(s) * d, d);
  }
  for (std::size_t s = 0; s < an.followers().size(); ++s) {
    x.segment(an.followers()[s] * d, d) = followers.segment(static_cast<Eigen::Index>(s) * d, d);
  }
  return x;
}

double localization_objective(const AnchoredNetwork& an, const Eigen::VectorXd& estimate) {
  const int d = an.dimension();
  double j = 0.0;
  // Each undirected edge appears twice in the double sum with equal terms.
  for (int k = 0; k < an.network().num_edges(); ++k) {
    const Edge& e = an.network().graph().edges()[k];
    const Eigen::VectorXd g = an.bearings().segment(k * d, d);
    const Eigen::VectorXd diff = estimate.segment(e.first * d, d) - estimate.segment(e.second * d, d);
    j += (diff - g * g.dot(diff)).squaredNorm();
  }
  return j;
}

Eigen::VectorXd localization_protocol_field(const AnchoredNetwork& an,
                                            const Eigen::VectorXd& follower_estimates,
                                            const Eigen::VectorXd& anchor_positions) {
  const int d = an.dimension();
  const int n = an.network().num_nodes();
  const Eigen::VectorXd x = assemble_estimate(an, follower_estimates, anchor_positions);
  std::vector<int> slot(static_cast<std::size_t>(n), -1);
  for (std::size_t s = 0; s < an.followers().size(); ++s) slot[an.followers()[s]] = static_cast<int>(s);

  Eigen::VectorXd rate = Eigen::VectorXd::Zero(follower_estimates.size());
  for (int k = 0; k < an.network().num_edges(); ++k) {
    const Edge& e = an.network().graph().edges()[k];
    const Eigen::VectorXd g = an.bearings().segment(k * d, d);
    const Eigen::VectorXd diff = x.segment(e.first * d, d) - x.segment(e.second * d, d);
    const Eigen::VectorXd pull = diff - g * g.dot(diff);  // P_g (x_i - x_j)
    if (slot[e.first] >= 0) rate.segment(slot[e.first] * d, d) -= pull;
    if (slot[e.second] >= 0) rate.segment(slot[e.second] * d, d) += pull;
  }
  return rate;
}

LocalizationRun simulate_localization(const AnchoredNetwork& an,
                                      const Eigen::VectorXd& initial_followers,
                                      const SimConfig& cfg) {
  const int d = an.dimension();
  if (initial_followers.size() != static_cast<Eigen::Index>(an.followers().size()) * d) {
    throw InputError("initial follower estimate has the wrong size");
  }
  LocalizationRun run;
  run.localizable = is_bearing_localizable(an).localizable;
  run.has_truth = an.bearings_from_truth();

  const Eigen::VectorXd anchors = an.anchor_positions();
  const Eigen::VectorXd truth = an.follower_positions();
  const Field field = [&](double, const State& x) {
    return localization_protocol_field(an, x, anchors);
  };

  Observer obs;
  obs.names.push_back("objective");
  if (run.has_truth) {
    obs.names.push_back("max_error");
    for (int f : an.followers()) obs.names.push_back("err_" + std::to_string(f + 1));
  }
  obs.evaluate = [&](double, const State& x) {
    std::vector<double> row;
    row.push_back(localization_objective(an, assemble_estimate(an, x, anchors)));
    if (run.has_truth) {
      std::vector<double> errs;
      for (std::size_t s = 0; s < an.followers().size(); ++s) {
        const auto off = static_cast<Eigen::Index>(s) * d;
        errs.push_back((x.segment(off, d) - truth.segment(off, d)).norm());
      }
      row.push_back(errs.empty() ? 0.0 : *std::max_element(errs.begin(), errs.end()));
      row.insert(row.end(), errs.begin(), errs.end());
    }
    return row;
  };

  IntegrateOptions options;
  options.observer = std::move(obs);
  run.trajectory = integrate(field, initial_followers, cfg, options);
  if (run.has_truth) {
    const State& last = run.trajectory.final_state();
    run.final_errors.resize(static_cast<Eigen::Index>(an.followers().size()));
    for (Eigen::Index s = 0; s < run.final_errors.size(); ++s) {
      run.final_errors(s) = (last.segment(s * d, d) - truth.segment(s * d, d)).norm();
    }
    run.final_max_error = run.final_errors.size() > 0 ? run.final_errors.maxCoeff() : 0.0;
  }
  return run;
}

}  // namespace bearing
