#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "locpred/environments.hpp"
#include "locpred/pseudodist.hpp"
#include "locpred/regularizer.hpp"
#include "locpred/rng.hpp"
#include "locpred/sampling.hpp"
#include "support.hpp"

using namespace locpred;

TEST_SUITE("regularizer") {

TEST_CASE("closed-form values at landmark points") {
  Eigen::MatrixXd half = 0.5 * Eigen::MatrixXd::Identity(2, 2);
  CHECK(logdet_reg(half, 2) == doctest::Approx(2.0).epsilon(1e-12));

  const PseudoDistribution v = PseudoDistribution::from_labeling({0, 1}, 2);
  CHECK(logdet_reg(v) == doctest::Approx(std::log2(5.0)).epsilon(1e-12));

  const PseudoDistribution u = PseudoDistribution::uniform(2, 2);
  CHECK(logdet_reg(u) == doctest::Approx(std::log2(12.0)).epsilon(1e-12));

  CHECK_THROWS_AS(logdet_reg(-Eigen::MatrixXd::Identity(2, 2), 2),
                  std::domain_error);
}

TEST_CASE("value stays inside the certified range on feasible points") {
  std::mt19937_64 rng = stream_rng(31, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + uniform_index(rng, 4);  // 2..5
    const int k = 2 + uniform_index(rng, 3);  // 2..4
    const LabelIndexing ix{n, k};
    const PseudoDistribution a = (trial % 2 == 0)
                                     ? random_feasible_mixture(ix, rng)
                                     : random_projected_feasible(ix, rng);
    const double r = logdet_reg(a);
    CHECK(r >= -1e-9);
    CHECK(r <= n * k + 1e-9);
  }
}

TEST_CASE("gradient closed forms at diagonal points") {
  Eigen::MatrixXd half = 0.5 * Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd g = logdet_reg_gradient(half, 2);
  const double want = 1.0 / std::log(2.0);
  CHECK(g(0, 0) == doctest::Approx(want).epsilon(1e-12));
  CHECK(g(1, 1) == doctest::Approx(want).epsilon(1e-12));
  CHECK(std::abs(g(0, 1)) <= 1e-14);

  for (int k = 2; k <= 4; ++k) {
    const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(3, 3);
    const Eigen::MatrixXd gz = logdet_reg_gradient(z, k);
    CHECK((gz - (k / std::log(2.0)) * Eigen::MatrixXd::Identity(3, 3))
              .norm() <= 1e-13);
  }
}

TEST_CASE("gradient matches central finite differences") {
  std::mt19937_64 rng = stream_rng(32, 0);
  for (int point = 0; point < 10; ++point) {
    const int n = 2 + uniform_index(rng, 2);
    const int k = 2 + uniform_index(rng, 2);
    const LabelIndexing ix{n, k};
    const PseudoDistribution a = random_feasible_mixture(ix, rng);
    const Eigen::MatrixXd grad = logdet_reg_gradient(a);
    for (int d = 0; d < 10; ++d) {
      Eigen::MatrixXd dir = random_symmetric(ix.size(), rng, 1.0);
      dir /= dir.norm();
      const double fd = testsupport::central_difference(
          [&](const Eigen::MatrixXd& m) { return logdet_reg(m, k); },
          a.entries, dir, 1e-4);
      const double analytic = (grad.array() * dir.array()).sum();
      const double rel =
          std::abs(fd - analytic) / std::max(1.0, std::abs(analytic));
      CHECK(rel <= 1e-5);
    }
  }
}

TEST_CASE("midpoint concavity on random feasible pairs") {
  std::mt19937_64 rng = stream_rng(33, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + uniform_index(rng, 3);
    const int k = 2 + uniform_index(rng, 2);
    const LabelIndexing ix{n, k};
    const PseudoDistribution a = random_feasible_mixture(ix, rng);
    const PseudoDistribution b = random_feasible_mixture(ix, rng);
    const Eigen::MatrixXd mid = 0.5 * (a.entries + b.entries);
    CHECK(logdet_reg(mid, k) >=
          0.5 * logdet_reg(a) + 0.5 * logdet_reg(b) - 1e-10);
  }
}

TEST_CASE("uniform point maximizes along segments to labeling points") {
  std::mt19937_64 rng = stream_rng(34, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + uniform_index(rng, 3);
    const int k = 2 + uniform_index(rng, 2);
    const PseudoDistribution u = PseudoDistribution::uniform(n, k);
    const PseudoDistribution v = PseudoDistribution::from_labeling(
        random_labeling(n, k, rng), k);
    double prev = logdet_reg(u);
    for (double t : {0.25, 0.5, 0.75, 1.0}) {
      const Eigen::MatrixXd seg = (1.0 - t) * u.entries + t * v.entries;
      const double r = logdet_reg(seg, k);
      CHECK(r < prev);
      prev = r;
    }
  }
}

TEST_CASE("payoff-distance concavity margin is nonnegative") {
  const PseudoDistribution a = PseudoDistribution::from_labeling({0, 1}, 2);
  const PseudoDistribution b = PseudoDistribution::from_labeling({0, 0}, 2);
  const RoundQuery q{0, 1};
  const PayoffMatrix cut = maxcut_payoff(CutOutcome::kCut, 2);
  SUBCASE("identical arguments give exactly zero") {
    const double gap = concavity_modulus_check(a, a, q, cut, 0.5);
    CHECK(gap == 0.0);
  }
  SUBCASE("antipodal labelings at half mixing") {
    const double pa = payoff_value(extract_block(a, q.i, q.j), cut);
    const double pb = payoff_value(extract_block(b, q.i, q.j), cut);
    CHECK(std::abs(pa - pb) == doctest::Approx(2.0));
    CHECK(concavity_modulus_check(a, b, q, cut, 0.5) >= 0.0);
  }
  SUBCASE("randomized pairs") {
    std::mt19937_64 rng = stream_rng(35, 0);
    for (int trial = 0; trial < 300; ++trial) {
      const int n = 2 + uniform_index(rng, 3);  // 2..4
      const int k = 2 + uniform_index(rng, 2);  // 2..3
      const LabelIndexing ix{n, k};
      const PseudoDistribution x = random_feasible_mixture(ix, rng);
      const PseudoDistribution y = (trial % 2 == 0)
                                       ? random_feasible_mixture(ix, rng)
                                       : random_projected_feasible(ix, rng);
      const int i = uniform_index(rng, n);
      int j = uniform_index(rng, n - 1);
      if (j >= i) ++j;
      const PayoffMatrix p = maxcut_payoff(
          uniform01(rng) < 0.5 ? CutOutcome::kCut : CutOutcome::kNotCut, k);
      const double eps = 0.05 + 0.9 * uniform01(rng);
      CHECK(concavity_modulus_check(x, y, RoundQuery{i, j}, p, eps) >= 0.0);
    }
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(concavity_modulus_check(a, b, q, cut, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(concavity_modulus_check(a, b, q, cut, 1.0),
                    std::invalid_argument);
    Eigen::MatrixXd bad = a.entries;
    bad(0, 0) += 0.5;
    CHECK_THROWS_AS(
        concavity_modulus_check(PseudoDistribution{a.indexing, bad}, b, q,
                                cut, 0.5),
        std::invalid_argument);
  }
}

}  // TEST_SUITE
