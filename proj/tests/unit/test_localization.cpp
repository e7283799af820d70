#include <cmath>

#include "bearing/errors.hpp"
#include "bearing/localization.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bearing;
using bt::Mat;
using bt::Vec;

namespace {

AnchoredNetwork three_node() {
  return AnchoredNetwork(Network(Graph(3, {{0, 2}, {1, 2}}), 2, bt::vec({0, 0, 2, 0, 1, 1})), {0, 1});
}

std::vector<int> pick_anchors(int n, int count, std::mt19937_64& rng) {
  std::vector<int> all(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all[i] = i;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(static_cast<std::size_t>(count));
  return all;
}

}  // namespace

TEST_SUITE("localization") {
  TEST_CASE("partition of the three-node example") {
    const AnchoredNetwork an = three_node();
    const LaplacianPartition part = partition_laplacian(an);
    CHECK((part.ff - Mat::Identity(2, 2)).norm() < 1e-15);
    CHECK((part.fa - part.af.transpose()).norm() < 1e-15);
    CHECK(part.followers == std::vector<int>{2});
  }

  TEST_CASE("partition reassembles the Laplacian") {
    std::mt19937_64 rng(1);
    const int n = 7;
    const int d = 3;
    const Network net(random_henneberg_graph(n, rng), d, bt::random_vector(n * d, rng));
    const AnchoredNetwork an(net, {5, 1, 3});
    CHECK(an.anchors() == std::vector<int>{1, 3, 5});
    CHECK(an.followers() == std::vector<int>{0, 2, 4, 6});
    const LaplacianPartition part = partition_laplacian(an);
    const Mat l = bearing_laplacian(net);
    std::vector<int> order = an.anchors();
    order.insert(order.end(), an.followers().begin(), an.followers().end());
    Mat permuted(n * d, n * d);
    permuted << part.aa, part.af, part.fa, part.ff;
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        CHECK((permuted.block(r * d, c * d, d, d) - l.block(order[r] * d, order[c] * d, d, d)).norm() < 1e-15);
      }
    }
    // With true bearings L_ff p_f = -L_fa p_a.
    CHECK((part.ff * an.follower_positions() + part.fa * an.anchor_positions()).norm() < 1e-12);
  }

  TEST_CASE("partition edge cases") {
    const Network net(Graph(3, {{0, 1}, {1, 2}}), 2, bt::vec({0, 0, 1, 0, 1, 1}));
    CHECK_THROWS_AS(partition_laplacian(AnchoredNetwork(net, {})), InputError);
    const LaplacianPartition all = partition_laplacian(AnchoredNetwork(net, {0, 1, 2}));
    CHECK(all.ff.size() == 0);
    CHECK_THROWS_AS(AnchoredNetwork(net, {4}), InputError);
  }

  TEST_CASE("localizability examples") {
    const LocalizabilityReport ok = is_bearing_localizable(three_node());
    CHECK(ok.localizable);
    CHECK(ok.sigma_min == doctest::Approx(1.0));

    // Follower collinear with both anchors.
    const AnchoredNetwork line(Network(Graph(3, {{0, 2}, {1, 2}}), 2, bt::vec({0, 0, 2, 0, 1, 0})), {0, 1});
    const LocalizabilityReport bad = is_bearing_localizable(line);
    CHECK_FALSE(bad.localizable);
    CHECK(bad.anchor_free_motion);
    REQUIRE(bad.anchor_free_witness.has_value());
    CHECK((partition_laplacian(line).ff * *bad.anchor_free_witness).norm() < 1e-10);

    const Network sq(bt::square_with_diagonal(), 2, bt::unit_square());
    CHECK_FALSE(is_bearing_localizable(AnchoredNetwork(sq, {})).localizable);
    CHECK_FALSE(is_bearing_localizable(AnchoredNetwork(sq, {0})).localizable);
    const LocalizabilityReport two = is_bearing_localizable(AnchoredNetwork(sq, {0, 1}));
    CHECK(two.localizable);
    CHECK(two.anchor_bound == doctest::Approx(1.5));
    CHECK(two.anchor_bound_satisfied);
  }

  TEST_CASE("solve recovers the truth") {
    const LocalizationSolution sol = solve_localization(three_node());
    CHECK((sol.followers - bt::vec({1, 1})).norm() < 1e-12);
    CHECK(sol.condition_number == doctest::Approx(1.0));
    CHECK(sol.objective < 1e-24);

    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
      const int d = 2 + trial % 2;
      const int n = 5 + trial % 6;
      const Network net(random_henneberg_graph(n, rng), d, bt::random_vector(n * d, rng));
      const AnchoredNetwork an(net, pick_anchors(n, 2, rng));
      if (!is_bearing_localizable(an).localizable) continue;
      CHECK((solve_localization(an).followers - an.follower_positions()).norm() < 1e-9);
    }

    const AnchoredNetwork line(Network(Graph(3, {{0, 2}, {1, 2}}), 2, bt::vec({0, 0, 2, 0, 1, 0})), {0, 1});
    CHECK_THROWS_AS(solve_localization(line), InfeasibleError);
  }

  TEST_CASE("objective equals the Laplacian quadratic form") {
    const AnchoredNetwork an = three_node();
    const Vec truth = an.network().positions();
    CHECK(localization_objective(an, truth) < 1e-24);
    Vec shifted = truth;
    shifted.segment(4, 2) += bt::vec({0.3, 0.3});
    CHECK(localization_objective(an, shifted) > 0.0);

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 6;
      const int d = 2 + trial % 2;
      const Network net(random_henneberg_graph(n, rng), d, bt::random_vector(n * d, rng));
      const AnchoredNetwork ran(net, {0, 1});
      const Vec x = bt::random_vector(n * d, rng);
      CHECK(std::abs(localization_objective(ran, x) - x.dot(ran.laplacian() * x)) < 1e-12);
    }
  }

  TEST_CASE("protocol field matches the matrix form") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 10; ++trial) {
      const int n = 7;
      const int d = 2 + trial % 2;
      const Network net(random_henneberg_graph(n, rng), d, bt::random_vector(n * d, rng));
      const AnchoredNetwork an(net, pick_anchors(n, 3, rng));
      const LaplacianPartition part = partition_laplacian(an);
      const Vec xf = bt::random_vector(part.ff.rows(), rng);
      const Vec pa = an.anchor_positions();
      const Vec expected = -part.ff * xf - part.fa * pa;
      CHECK((localization_protocol_field(an, xf, pa) - expected).norm() < 1e-12);
      CHECK(localization_protocol_field(an, an.follower_positions(), pa).norm() < 1e-12);
      // Gradient of J with anchors pinned.
      const auto j = [&](const Vec& f) { return localization_objective(an, assemble_estimate(an, f, pa)); };
      CHECK(bt::rel_error(localization_protocol_field(an, xf, pa), -0.5 * bt::numeric_gradient(j, xf)) < 1e-6);
    }
  }

  TEST_CASE("simulation converges and J is non-increasing") {
    const AnchoredNetwork an = three_node();
    SimConfig cfg;
    cfg.horizon = 20.0;
    const LocalizationRun run = simulate_localization(an, bt::vec({-4, 7}), cfg);
    CHECK(run.localizable);
    CHECK(run.has_truth);
    CHECK(run.final_max_error < 1e-6);
    const auto j = run.trajectory.metric("objective");
    for (std::size_t k = 1; k < j.size(); ++k) CHECK(j[k] <= j[k - 1] + 1e-15);
    CHECK(run.trajectory.metric_names.back() == "err_3");

    const LocalizationRun still = simulate_localization(an, an.follower_positions(), cfg);
    CHECK(still.final_max_error < 1e-12);
  }

  TEST_CASE("non-localizable simulation plateaus along the null space") {
    const AnchoredNetwork line(Network(Graph(3, {{0, 2}, {1, 2}}), 2, bt::vec({0, 0, 2, 0, 1, 0})), {0, 1});
    SimConfig cfg;
    cfg.horizon = 20.0;
    const Vec init = bt::vec({1.5, 0.5});
    const LocalizationRun run = simulate_localization(line, init, cfg);
    CHECK_FALSE(run.localizable);
    // L_ff = 2 diag(0, 1): the x error component never decays.
    CHECK(run.final_max_error == doctest::Approx(0.5).epsilon(1e-6));
  }

  TEST_CASE("measured bearings are normalised and give no truth metrics") {
    const Network net(Graph(3, {{0, 2}, {1, 2}}), 2, bt::vec({0, 0, 2, 0, 5, 5}));
    // Bearings consistent with a follower at (1, 1), not with the stored (5, 5).
    const AnchoredNetwork an(net, {0, 1}, bt::vec({2, 2, -1, 1}));
    CHECK_FALSE(an.bearings_from_truth());
    CHECK(std::abs(an.bearings().segment(0, 2).norm() - 1.0) < 1e-15);
    CHECK((solve_localization(an).followers - bt::vec({1, 1})).norm() < 1e-12);
    SimConfig cfg;
    cfg.horizon = 1.0;
    const LocalizationRun run = simulate_localization(an, bt::vec({0, 0}), cfg);
    CHECK_FALSE(run.has_truth);
    CHECK(run.trajectory.metric_names == std::vector<std::string>{"objective"});
    CHECK_THROWS_AS(AnchoredNetwork(net, {0, 1}, bt::vec({1, 0})), InputError);
  }

  TEST_CASE("inconsistent bearings converge to the least-squares minimiser") {
    const Network net(Graph(4, {{0, 3}, {1, 3}, {2, 3}}), 2, bt::vec({0, 0, 2, 0, 1, 3, 1, 1}));
    Vec g = bearing_function(net);
    g.segment(4, 2) = bt::vec({0.1, -1.0});
    const AnchoredNetwork an(net, {0, 1, 2}, g);
    const LocalizationSolution sol = solve_localization(an);
    CHECK(sol.objective > 0.0);
    SimConfig cfg;
    cfg.horizon = 40.0;
    const LocalizationRun run = simulate_localization(an, bt::vec({0, 0}), cfg);
    CHECK((run.trajectory.final_state() - sol.followers).norm() < 1e-6);
  }

  TEST_CASE("rigidity and anchor-count implications") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
      const int d = 2 + trial % 2;
      const int n = 5 + trial % 5;
      const Network net(random_henneberg_graph(n, rng), d, bt::random_vector(n * d, rng));
      const bool ibr = is_infinitesimally_bearing_rigid(net).rigid();
      const std::vector<int> anchors = pick_anchors(n, 2, rng);
      const LocalizabilityReport rep = is_bearing_localizable(AnchoredNetwork(net, anchors));
      if (ibr) CHECK(rep.localizable);
      const Network aug(augment_anchors(net.graph(), anchors), d, net.positions());
      CHECK(rep.localizable == is_infinitesimally_bearing_rigid(aug).rigid());
      CHECK(rep.localizable == is_bearing_localizable(AnchoredNetwork(aug, anchors)).localizable);
      if (rep.localizable) CHECK(rep.anchor_bound_satisfied);
    }
  }
}
