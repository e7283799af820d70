#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "bearing/errors.hpp"
#include "bearing/rigidity.hpp"
#include "bearing/sim.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bearing;
using bt::Mat;
using bt::Vec;

namespace {

Vec bearings_at(const Graph& g, int d, const Vec& p) { return bearing_function(g, d, p); }

// Gram-Schmidt on [translations, p] as an oracle for the trivial basis.
Mat gram_schmidt_trivial(int n, int d, const Vec& p) {
  std::vector<Vec> cols;
  for (int c = 0; c < d; ++c) {
    Vec t = Vec::Zero(n * d);
    for (int i = 0; i < n; ++i) t(i * d + c) = 1.0;
    cols.push_back(t);
  }
  cols.push_back(p);
  std::vector<Vec> basis;
  for (Vec v : cols) {
    for (const Vec& b : basis) v -= b.dot(v) * b;
    if (v.norm() > 1e-10) basis.push_back(v / v.norm());
  }
  Mat out(n * d, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = basis[k];
  return out;
}

}  // namespace

TEST_SUITE("rigidity") {
  TEST_CASE("projection examples") {
    CHECK((projection(bt::vec({1, 0})) - Mat{{0, 0}, {0, 1}}).norm() < 1e-15);
    Mat diag = Mat::Identity(3, 3);
    diag(2, 2) = 0.0;
    CHECK((projection(bt::vec({0, 0, 2})) - diag).norm() < 1e-15);
    CHECK((projection(bt::vec({1, 1})) - Mat{{0.5, -0.5}, {-0.5, 0.5}}).norm() < 1e-15);
    CHECK_THROWS_AS(projection(bt::vec({0, 1e-12})), InputError);
  }

  TEST_CASE("projection is symmetric idempotent with spectrum {0, 1, ..}") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 100; ++trial) {
      const int d = 2 + trial % 3;
      const Vec x = bt::random_vector(d, rng) * 5.0;
      const Mat p = projection(x);
      CHECK((p - p.transpose()).norm() < 1e-14);
      CHECK((p * p - p).norm() < 1e-14);
      CHECK((p * x).norm() < 1e-13);
      Eigen::SelfAdjointEigenSolver<Mat> eig(p);
      CHECK(std::abs(eig.eigenvalues()(0)) < 1e-14);
      for (int k = 1; k < d; ++k) CHECK(std::abs(eig.eigenvalues()(k) - 1.0) < 1e-14);
    }
  }

  TEST_CASE("bearing function examples") {
    const Graph edge(2, {{0, 1}});
    CHECK((bearings_at(edge, 2, bt::vec({0, 0, 1, 0})) - bt::vec({1, 0})).norm() < 1e-15);
    const double r = std::sqrt(2.0) / 2.0;
    CHECK((bearings_at(edge, 2, bt::vec({0, 0, 1, 1})) - bt::vec({r, r})).norm() < 1e-15);
    CHECK_THROWS_AS(bearings_at(edge, 2, bt::vec({1, 1, 1, 1})), CollocationError);
    CHECK_THROWS_AS(Network(edge, 2, bt::vec({1, 1, 1, 1})), CollocationError);
  }

  TEST_CASE("network validation") {
    const Graph edge(2, {{0, 1}});
    CHECK_THROWS_AS(Network(edge, 1, bt::vec({0, 1})), InputError);
    CHECK_THROWS_AS(Network(edge, 2, bt::vec({0, 1, 2})), InputError);
    CHECK_THROWS_AS(Network(Graph(1), 2, bt::vec({0, 1})), InputError);
  }

  TEST_CASE("bearing rigidity matrix: two-node example and finite differences") {
    const Network two(Graph(2, {{0, 1}}), 2, bt::vec({0, 0, 2, 0}));
    const Mat expected{{0, 0, 0, 0}, {0, -0.5, 0, 0.5}};
    CHECK((bearing_rigidity_matrix(two) - expected).norm() < 1e-15);

    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
      const int d = 2 + trial % 2;
      const int n = 4 + trial % 5;
      const Graph g = random_henneberg_graph(n, rng);
      const Vec p = bt::random_vector(n * d, rng);
      const Network net(g, d, p);
      const Mat rb = bearing_rigidity_matrix(net);
      const Mat fd = bt::numeric_jacobian([&](const Vec& x) { return bearings_at(g, d, x); }, p);
      CHECK(bt::rel_error(rb, fd) < 1e-6);
      CHECK((rb * p).norm() < 1e-12);
    }
  }

  TEST_CASE("distance rigidity matrix: example and finite differences") {
    const Network two(Graph(2, {{0, 1}}), 2, bt::vec({0, 0, 2, 0}));
    CHECK((distance_rigidity_matrix(two) - Mat{{-2, 0, 2, 0}}).norm() < 1e-15);

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
      const int d = 2 + trial % 2;
      const Graph g = random_henneberg_graph(6, rng);
      const Vec p = bt::random_vector(6 * d, rng);
      const Network net(g, d, p);
      const auto half_sq = [&](const Vec& x) {
        Vec f(g.num_edges());
        for (int k = 0; k < g.num_edges(); ++k) {
          const Edge& e = g.edges()[k];
          f(k) = 0.5 * (x.segment(e.second * d, d) - x.segment(e.first * d, d)).squaredNorm();
        }
        return f;
      };
      const Mat rd = distance_rigidity_matrix(net);
      CHECK(bt::rel_error(rd, bt::numeric_jacobian(half_sq, p)) < 1e-6);
      Vec t = Vec::Zero(6 * d);
      for (int i = 0; i < 6; ++i) t(i * d) = 1.0;
      CHECK((rd * t).norm() < 1e-12);
    }
  }

  TEST_CASE("bearing laplacian structure") {
    const Network two(Graph(2, {{0, 1}}), 2, bt::vec({0, 0, 2, 0}));
    const Mat p{{0, 0}, {0, 1}};
    Mat expected(4, 4);
    expected << p, -p, -p, p;
    const Mat l = bearing_laplacian(two);
    CHECK((l - expected).norm() < 1e-15);
    CHECK(bt::oracle_rank(l) == 1);

    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
      const int d = 2 + trial % 2;
      const int n = 3 + trial % 6;
      const Graph g = bt::random_graph(n, 0.6, rng);
      if (g.num_edges() == 0) continue;
      const Vec pos = bt::random_vector(n * d, rng);
      const Network net(g, d, pos);
      const Mat lap = bearing_laplacian(net);
      const Mat rb = bearing_rigidity_matrix(net);
      CHECK((lap - lap.transpose()).norm() < 1e-13);
      for (int s = 0; s < 5; ++s) {
        const Vec x = bt::random_vector(n * d, rng);
        CHECK(x.dot(lap * x) >= -1e-12);
      }
      CHECK((lap * pos).norm() < 1e-12);
      const Mat trivial = trivial_bearing_motion_basis(net).basis;
      CHECK((lap * trivial).norm() < 1e-12);
      // Same rank and null space as R_B.
      CHECK(bt::oracle_rank(lap) == bt::oracle_rank(rb));
      const Mat null_l = null_space(lap);
      CHECK((rb * null_l).norm() < 1e-8);
      CHECK(bt::oracle_rank(lap) <= d * n - d - 1);
    }
  }

  TEST_CASE("trivial bearing motion basis") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
      const int d = 2 + trial % 2;
      const Graph g = random_henneberg_graph(5, rng);
      const Vec p = bt::random_vector(5 * d, rng);
      const Network net(g, d, p);
      const MotionBasis mb = trivial_bearing_motion_basis(net);
      CHECK_FALSE(mb.degenerate);
      CHECK(mb.basis.cols() == d + 1);
      CHECK((mb.basis.transpose() * mb.basis - Mat::Identity(d + 1, d + 1)).norm() < 1e-12);
      CHECK((bearing_rigidity_matrix(net) * mb.basis).norm() < 1e-12);
      const Mat gs = gram_schmidt_trivial(5, d, p);
      // Same subspace: projectors agree.
      CHECK((mb.basis * mb.basis.transpose() - gs * gs.transpose()).norm() < 1e-10);
    }

    const MotionBasis axis = trivial_bearing_motion_basis(2, 2, bt::vec({0, 0, 1, 0}));
    CHECK(axis.basis.cols() == 3);
    CHECK_FALSE(axis.degenerate);

    const MotionBasis zero = trivial_bearing_motion_basis(3, 2, Vec::Zero(6));
    CHECK(zero.degenerate);
    CHECK(zero.basis.cols() == 2);
  }

  TEST_CASE("infinitesimal bearing rigidity examples") {
    const RigidityReport two = is_infinitesimally_bearing_rigid(Network(Graph(2, {{0, 1}}), 2, bt::vec({0, 0, 1, 0})));
    CHECK(two.rigid());
    CHECK(two.rank == 1);

    const Network square(bt::cycle(4), 2, bt::unit_square());
    const RigidityReport sq = is_infinitesimally_bearing_rigid(square);
    CHECK_FALSE(sq.rigid());
    CHECK(sq.rank == 4);
    CHECK(sq.rank + sq.nullity == 8);
    REQUIRE(sq.witness.has_value());
    const Vec& w = *sq.witness;
    CHECK(std::abs(w.norm() - 1.0) < 1e-12);
    const Mat rb = bearing_rigidity_matrix(square);
    CHECK((rb * w).norm() <= 1e-8 * sq.singular_values(0));
    CHECK((trivial_bearing_motion_basis(square).basis.transpose() * w).norm() < 1e-10);

    const RigidityReport diag = is_infinitesimally_bearing_rigid(Network(bt::square_with_diagonal(), 2, bt::unit_square()));
    CHECK(diag.rigid());
    CHECK(diag.rank == 5);
    CHECK_FALSE(diag.witness.has_value());
  }

  TEST_CASE("witness invariants on random non-rigid networks") {
    std::mt19937_64 rng(6);
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
      const int d = 2 + trial % 2;
      const int n = 4 + trial % 4;
      const Graph g = bt::random_graph(n, 0.35, rng);
      if (g.num_edges() == 0) continue;
      const Network net(g, d, bt::random_vector(n * d, rng));
      const RigidityReport rep = is_infinitesimally_bearing_rigid(net);
      CHECK(rep.rank + rep.nullity == n * d);
      CHECK(rep.rank == bt::oracle_rank(bearing_rigidity_matrix(net)));
      if (rep.rigid()) continue;
      REQUIRE(rep.witness.has_value());
      ++checked;
      CHECK((bearing_rigidity_matrix(net) * *rep.witness).norm() <= 1e-8 * rep.singular_values(0));
      CHECK((trivial_bearing_motion_basis(net).basis.transpose() * *rep.witness).norm() < 1e-8);
    }
    CHECK(checked > 10);
  }

  TEST_CASE("verdict invariant under translation and scaling") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
      const int d = 2 + trial % 2;
      const int n = 5;
      const Graph g = trial % 2 == 0 ? random_henneberg_graph(n, rng) : bt::random_graph(n, 0.5, rng);
      if (g.num_edges() == 0) continue;
      const Vec p = bt::random_vector(n * d, rng);
      const Vec shift = bt::random_vector(d, rng) * 10.0;
      const Vec moved = 3.5 * p + shift.replicate(n, 1);
      CHECK(is_infinitesimally_bearing_rigid(Network(g, d, p)).rigid() ==
            is_infinitesimally_bearing_rigid(Network(g, d, moved)).rigid());
    }
  }

  TEST_CASE("infinitesimal distance rigidity examples") {
    const Network tri(bt::cycle(3), 2, bt::vec({0, 0, 1, 0, 0.3, 0.8}));
    const RigidityReport t = is_infinitesimally_distance_rigid(tri);
    CHECK(t.rigid());
    CHECK(t.rank == 3);

    const RigidityReport sq = is_infinitesimally_distance_rigid(Network(bt::cycle(4), 2, bt::unit_square()));
    CHECK_FALSE(sq.rigid());
    REQUIRE(sq.witness.has_value());
    CHECK((trivial_distance_motion_basis(Network(bt::cycle(4), 2, bt::unit_square())).transpose() * *sq.witness)
              .norm() < 1e-10);

    // Rotation about the edge axis moves nothing, so only two rotations count.
    const Network two3(Graph(2, {{0, 1}}), 3, bt::vec({0, 0, 0, 1, 0, 0}));
    CHECK(is_infinitesimally_distance_rigid(two3).rigid());
  }

  TEST_CASE("3D networks can be bearing rigid without being distance rigid") {
    // Square with diagonal placed in 3D: folds about the diagonal preserve distances.
    Vec p = Vec::Zero(12);
    const Vec sq = bt::unit_square();
    for (int i = 0; i < 4; ++i) p.segment(i * 3, 2) = sq.segment(i * 2, 2);
    const Network net(bt::square_with_diagonal(), 3, p);
    CHECK(is_infinitesimally_bearing_rigid(net).rigid());
    CHECK_FALSE(is_infinitesimally_distance_rigid(net).rigid());
  }

  TEST_CASE("generic bearing rigidity sampling") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 5; ++trial) {
      const Graph g = random_henneberg_graph(6 + trial, rng);
      const GenericRigidityReport rep = is_generically_bearing_rigid(g, 3, kDefaultGenericTrials, 42);
      CHECK(rep.verdict == GenericVerdict::yes);
      CHECK(rep.certificate.has_value());
      CHECK(rep.trials_used >= 1);
      CHECK(rep.seed == 42u);
    }
    const GenericRigidityReport c4 = is_generically_bearing_rigid(bt::cycle(4), 2, 5, 1);
    CHECK(c4.verdict == GenericVerdict::inconclusive);
    CHECK(c4.trials_used == 5);
    CHECK(is_generically_bearing_rigid(Graph(2, {{0, 1}}), 2, 5, 1).verdict == GenericVerdict::yes);
    CHECK_THROWS_AS(is_generically_bearing_rigid(bt::cycle(3), 2, 0, 1), InputError);
  }

  TEST_CASE("random Laman networks in the plane are almost surely rigid") {
    std::mt19937_64 rng(10);
    const Graph g = random_henneberg_graph(8, rng);
    int rigid = 0;
    for (int s = 0; s < 1000; ++s) {
      const Vec p = random_configuration(8, 2, Box{}, rng, &g);
      rigid += is_infinitesimally_bearing_rigid(Network(g, 2, p)).rigid() ? 1 : 0;
    }
    CHECK(rigid >= 999);
  }
}

TEST_SUITE("projection_properties") {
  TEST_CASE("(a) parallel iff P_x y = 0") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
      const int d = 2 + trial % 3;
      const Vec x = bt::random_vector(d, rng);
      CHECK((projection(x) * (-2.5 * x)).norm() < 1e-12);
      const Vec y = bt::random_vector(d, rng);
      const double sin_angle = std::sqrt(std::max(0.0, 1.0 - std::pow(x.dot(y) / (x.norm() * y.norm()), 2)));
      if (sin_angle > 1e-3) CHECK((projection(x) * y).norm() > 1e-6);
    }
  }

  TEST_CASE("(b) x^T P_y x = y^T P_x y for unit vectors") {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 200; ++trial) {
      const int d = 2 + trial % 3;
      const Vec x = bt::random_unit(d, rng);
      const Vec y = bt::random_unit(d, rng);
      CHECK(std::abs(x.dot(projection(y) * x) - y.dot(projection(x) * y)) < 1e-12);
    }
  }

  TEST_CASE("(c) sum of projections nonsingular iff two are non-collinear") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
      const int d = 2 + trial % 2;
      const Vec base = bt::random_unit(d, rng);
      Mat collinear = Mat::Zero(d, d);
      for (int k = 0; k < 4; ++k) collinear += projection((k % 2 == 0 ? 1.0 : -2.0) * base);
      CHECK(bt::oracle_rank(collinear) < d);
      const Mat mixed = collinear + projection(bt::random_unit(d, rng));
      CHECK(bt::oracle_rank(mixed) == d);
    }
  }

  TEST_CASE("(d) planar P_x from the normal vector") {
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 200; ++trial) {
      const Vec x = bt::random_vector(2, rng);
      const Vec perp = bt::vec({-x(1), x(0)}) * 1.7;
      CHECK((projection(x) - perp * perp.transpose() / perp.squaredNorm()).norm() < 1e-12);
    }
  }

  TEST_CASE("(e) ||P_x - P_y|| = sin(angle)") {
    std::mt19937_64 rng(25);
    for (int trial = 0; trial < 200; ++trial) {
      const int d = 2 + trial % 3;
      const Vec x = bt::random_vector(d, rng);
      const Vec y = bt::random_vector(d, rng);
      const double c = std::clamp(x.dot(y) / (x.norm() * y.norm()), -1.0, 1.0);
      const double spectral = Eigen::JacobiSVD<Mat>(projection(x) - projection(y)).singularValues()(0);
      CHECK(std::abs(spectral - std::sin(std::acos(c))) < 1e-8);
    }
  }

  TEST_CASE("(f) P_x = -[x]^2 in 3D") {
    std::mt19937_64 rng(26);
    for (int trial = 0; trial < 200; ++trial) {
      const Eigen::Vector3d x = bt::random_unit(3, rng);
      const Eigen::Matrix3d s = skew(x);
      CHECK((projection(x) + s * s).norm() < 1e-12);
      const Eigen::Vector3d y = bt::random_vector(3, rng);
      CHECK((s * y - x.cross(y)).norm() < 1e-14);
    }
  }
}
