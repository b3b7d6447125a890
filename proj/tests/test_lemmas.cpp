#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "locpred/lemmas.hpp"
#include "locpred/rng.hpp"
#include "locpred/sampling.hpp"

using namespace locpred;

namespace {

Eigen::MatrixXd random_pd(int dim, std::mt19937_64& rng) {
  return random_psd(dim, rng, 0.2 + 0.3 * uniform01(rng));
}

}  // namespace

TEST_SUITE("lemmas") {

TEST_CASE("discrete entropy closed forms") {
  CHECK(discrete_entropy({0.5, 0.5}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(discrete_entropy({1.0, 0.0}) == 0.0);
  CHECK(discrete_entropy({0.25, 0.25, 0.25, 0.25}) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(discrete_entropy({0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(discrete_entropy({1.5, -0.5}), std::invalid_argument);
  CHECK_THROWS_AS(discrete_entropy({}), std::invalid_argument);
}

TEST_CASE("entropy concavity gap closed forms and padding") {
  CHECK(entropy_concavity_gap({0.3, 0.7}, {0.3, 0.7}, 0.4) == 0.0);

  const double gap =
      entropy_concavity_gap({1.0, 0.0}, {0.0, 1.0}, 0.5);
  CHECK(gap == doctest::Approx(std::log(2.0) - 0.25).epsilon(1e-12));

  // Unequal support lengths are zero-padded to a common support.
  const double padded =
      entropy_concavity_gap({1.0}, {0.0, 0.0, 1.0}, 0.5);
  CHECK(padded == doctest::Approx(std::log(2.0) - 0.25).epsilon(1e-12));

  CHECK_THROWS_AS(entropy_concavity_gap({1.0, 0.0}, {0.0, 1.0}, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(entropy_concavity_gap({1.0, 0.0}, {0.0, 1.0}, 1.0),
                  std::invalid_argument);
}

TEST_CASE("entropy concavity gap is nonnegative on random pairs") {
  std::mt19937_64 rng = stream_rng(41, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    const int support = 2 + uniform_index(rng, 19);  // 2..20
    const std::vector<double> p = random_distribution(support, rng);
    const std::vector<double> q = random_distribution(support, rng);
    const double eps = 0.02 + 0.96 * uniform01(rng);
    CHECK(entropy_concavity_gap(p, q, eps) >= -1e-12);
  }
}

TEST_CASE("log det of positive definite matrices") {
  CHECK(logdet_pd(Eigen::MatrixXd::Identity(3, 3)) == doctest::Approx(0.0));
  Eigen::MatrixXd d(2, 2);
  d << 2, 0, 0, 3;
  CHECK(logdet_pd(d) == doctest::Approx(std::log(6.0)).epsilon(1e-12));
  Eigen::MatrixXd sing(2, 2);
  sing << 1, 1, 1, 1;
  CHECK_THROWS_AS(logdet_pd(sing), std::domain_error);
}

TEST_CASE("characteristic-function variation bound closed form") {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  CHECK(gaussian_tv_lower_bound(id, id, 0, 1) == 0.0);

  Eigen::MatrixXd corr(2, 2);
  corr << 1, 0.5, 0.5, 1;
  const double want = 0.5 * std::abs(std::exp(-0.2) - std::exp(-0.3));
  CHECK(gaussian_tv_lower_bound(id, corr, 0, 1) ==
        doctest::Approx(want).epsilon(1e-12));

  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(gaussian_tv_lower_bound(zero, zero, 0, 1),
                  std::domain_error);
}

TEST_CASE("variation bound never exceeds grid-integrated distance") {
  std::mt19937_64 rng = stream_rng(42, 0);
  QuadratureOptions opts;
  opts.points_per_axis = 600;  // coarser grid for the routine suite
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::MatrixXd s1 = random_pd(2, rng);
    const Eigen::MatrixXd s2 = random_pd(2, rng);
    const double bound = gaussian_tv_lower_bound(s1, s2, 0, 1);
    const double tv = gaussian_tv_grid(s1, s2, opts);
    CHECK(bound <= tv + 1e-3);
  }
}

TEST_CASE("log det concavity gap closed forms") {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  CHECK(logdet_concavity_gap(id, id, 0, 1, 0.5, 1.0 / 16.0) == 0.0);

  Eigen::MatrixXd corr(2, 2);
  corr << 1, 0.5, 0.5, 1;
  const double delta = 0.5 / 4.0;
  const double want = std::log(0.9375) - 0.5 * std::log(0.75) -
                      (1.0 / 16.0) * 0.25 * delta * delta;
  const double got = logdet_concavity_gap(id, corr, 0, 1, 0.5, 1.0 / 16.0);
  CHECK(got == doctest::Approx(want).epsilon(1e-12));
  CHECK(got > 0.0);

  Eigen::MatrixXd sing(2, 2);
  sing << 1, 1, 1, 1;
  CHECK_THROWS_AS(logdet_concavity_gap(sing, id, 0, 1, 0.5, 1.0 / 16.0),
                  std::domain_error);
}

TEST_CASE("log det concavity gap is nonnegative on random pairs") {
  std::mt19937_64 rng = stream_rng(43, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    const int dim = 2 + uniform_index(rng, 5);  // 2..6
    const Eigen::MatrixXd s1 = random_pd(dim, rng);
    const Eigen::MatrixXd s2 = random_pd(dim, rng);
    const int i = uniform_index(rng, dim);
    int j = uniform_index(rng, dim - 1);
    if (j >= i) ++j;
    const double eps = 0.02 + 0.96 * uniform01(rng);
    CHECK(logdet_concavity_gap(s1, s2, i, j, eps) >= -1e-12);
  }
}

TEST_CASE("integrated gaussian entropy matches the closed form") {
  std::mt19937_64 rng = stream_rng(44, 0);
  QuadratureOptions opts;
  opts.points_per_axis = 900;
  for (int trial = 0; trial < 4; ++trial) {
    Eigen::MatrixXd s1(1, 1);
    s1 << 0.3 + 2.0 * uniform01(rng);
    CHECK(gaussian_entropy_quadrature(s1, opts) ==
          doctest::Approx(gaussian_entropy_closed_form(s1)).epsilon(1e-3));

    const Eigen::MatrixXd s2 = random_pd(2, rng);
    CHECK(gaussian_entropy_quadrature(s2, opts) ==
          doctest::Approx(gaussian_entropy_closed_form(s2)).epsilon(1e-3));
  }
  Eigen::MatrixXd unit(1, 1);
  unit << 1.0;
  CHECK(gaussian_entropy_closed_form(unit) ==
        doctest::Approx(0.5 * std::log(2.0 * M_PI * std::exp(1.0)))
            .epsilon(1e-12));
}

TEST_CASE("matched-covariance mixtures never beat the gaussian entropy") {
  std::mt19937_64 rng = stream_rng(45, 0);
  QuadratureOptions opts;
  opts.points_per_axis = 700;
  for (int trial = 0; trial < 10; ++trial) {
    const int d = (trial % 2 == 0) ? 1 : 2;
    GaussianMixture mix;
    mix.w = 0.2 + 0.6 * uniform01(rng);
    mix.mu1 = Eigen::VectorXd::Zero(d);
    mix.mu2 = Eigen::VectorXd::Zero(d);
    for (int c = 0; c < d; ++c) {
      mix.mu1[c] = 2.0 * (uniform01(rng) - 0.5);
      mix.mu2[c] = 2.0 * (uniform01(rng) - 0.5);
    }
    mix.s1 = random_pd(d, rng);
    mix.s2 = random_pd(d, rng);
    const double mix_entropy = mixture_entropy_quadrature(mix, opts);
    const double gaussian_cap =
        gaussian_entropy_closed_form(mix.covariance());
    CHECK(mix_entropy <= gaussian_cap + 1e-3);
  }
}

TEST_CASE("mixture moments combine component moments") {
  GaussianMixture mix;
  mix.w = 0.25;
  mix.mu1 = Eigen::VectorXd::Constant(1, 2.0);
  mix.mu2 = Eigen::VectorXd::Constant(1, -2.0);
  mix.s1 = Eigen::MatrixXd::Identity(1, 1);
  mix.s2 = Eigen::MatrixXd::Identity(1, 1);
  CHECK(mix.mean()[0] == doctest::Approx(-1.0));
  // Var = E[s] + E[mu^2] - mean^2 = 1 + (0.25*4 + 0.75*4) - 1 = 4.
  CHECK(mix.covariance()(0, 0) == doctest::Approx(4.0).epsilon(1e-12));
}

}  // TEST_SUITE
