#include "doctest.h"

#include "phasefrac/bfgs.hpp"
#include "support/oracles.hpp"

#include <random>

using namespace phasefrac;

namespace {

InverseOperator dense_inverse(const Eigen::MatrixXd& K) {
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  return [llt](const Eigen::VectorXd& b) { return Eigen::VectorXd(llt.solve(b)); };
}

Eigen::MatrixXd as_matrix(const BfgsInverse& b, int n) {
  Eigen::MatrixXd H(n, n);
  for (int j = 0; j < n; ++j) H.col(j) = b.apply(Eigen::VectorXd::Unit(n, j));
  return H;
}

}  // namespace

TEST_SUITE("bfgs") {

TEST_CASE("scalar update reduces to the secant") {
  Eigen::MatrixXd K0(1, 1);
  K0 << 2.0;
  BfgsInverse b(dense_inverse(K0));
  const Eigen::VectorXd s = Eigen::VectorXd::Constant(1, 1.0);
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(1, 3.0);
  CHECK(b.add_pair(s, y));
  // 2 - 4/2 + 9/3 = 3
  CHECK(b.apply(Eigen::VectorXd::Constant(1, 3.0))(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(oracle::bfgs_direct(K0, s, y)(0, 0) == doctest::Approx(3.0));
}

TEST_CASE("consistent pair leaves the operator unchanged") {
  std::mt19937 rng(1);
  const Eigen::MatrixXd K = oracle::random_spd(6, rng);
  BfgsInverse b(dense_inverse(K));
  const Eigen::VectorXd s = oracle::random_vector(6, rng);
  CHECK(b.add_pair(s, K * s));
  CHECK(oracle::rel_error(as_matrix(b, 6), K.inverse()) < 1e-12);
}

TEST_CASE("inverse form equals the direct update") {
  std::mt19937 rng(42);
  for (int n : {2, 5, 12, 20}) {
    CAPTURE(n);
    Eigen::MatrixXd K = oracle::random_spd(n, rng);
    BfgsInverse b(dense_inverse(K));
    const Eigen::MatrixXd T = oracle::random_spd(n, rng);  // secant pairs from another SPD map
    for (int k = 0; k < 6; ++k) {
      const Eigen::VectorXd s = oracle::random_vector(n, rng);
      const Eigen::VectorXd y = T * s;
      REQUIRE(b.add_pair(s, y));
      K = oracle::bfgs_direct(K, s, y);
      const Eigen::MatrixXd Hinv = as_matrix(b, n);
      CHECK(oracle::rel_error(Hinv, K.inverse()) < 1e-12);
      // secant condition on the newest pair, in stiffness form
      CHECK((K * s - y).norm() <= 1e-10 * y.norm());
      CHECK((Hinv * y - s).norm() <= 1e-10 * s.norm());
    }
    CHECK(b.num_pairs() == 6);
  }
}

TEST_CASE("pairs without positive curvature are skipped") {
  std::mt19937 rng(9);
  const Eigen::MatrixXd K = oracle::random_spd(4, rng);
  BfgsInverse b(dense_inverse(K));
  const Eigen::VectorXd s = oracle::random_vector(4, rng);
  CHECK_FALSE(b.add_pair(s, -K * s));
  CHECK_FALSE(b.add_pair(s, Eigen::VectorXd::Zero(4)));
  CHECK(b.num_pairs() == 0);
  CHECK(b.num_skipped() == 2);
  CHECK(oracle::rel_error(as_matrix(b, 4), K.inverse()) < 1e-12);

  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs = {{s, -K * s}, {s, 2 * K * s}};
  int skipped = 0;
  const Eigen::VectorXd r = oracle::random_vector(4, rng);
  const Eigen::VectorXd x = bfgs_apply_inverse(pairs, dense_inverse(K), r, &skipped);
  CHECK(skipped == 1);
  const Eigen::MatrixXd Kd = oracle::bfgs_direct(K, s, 2 * K * s);
  CHECK((x - Kd.inverse() * r).norm() < 1e-12 * x.norm());
}

TEST_CASE("reset and clear") {
  std::mt19937 rng(4);
  const Eigen::MatrixXd K = oracle::random_spd(3, rng);
  BfgsInverse b(dense_inverse(K));
  b.add_pair(oracle::random_vector(3, rng), K * oracle::random_vector(3, rng).cwiseAbs());
  b.clear();
  CHECK(b.num_pairs() == 0);
  const Eigen::MatrixXd K2 = 2 * K;
  b.reset(dense_inverse(K2));
  CHECK(oracle::rel_error(as_matrix(b, 3), K2.inverse()) < 1e-12);
}

}  // TEST_SUITE
