#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "locpred/errors.hpp"
#include "locpred/pseudodist.hpp"
#include "locpred/rng.hpp"
#include "locpred/sampling.hpp"
#include "support.hpp"

using namespace locpred;

TEST_SUITE("pseudodist") {

TEST_CASE("indexing maps item-label pairs bijectively") {
  const LabelIndexing ix = make_indexing(3, 4);
  std::vector<bool> seen(ix.size(), false);
  for (int i = 0; i < ix.n; ++i)
    for (int a = 0; a < ix.k; ++a) {
      const int r = ix.row(i, a);
      REQUIRE(r >= 0);
      REQUIRE(r < ix.size());
      CHECK_FALSE(seen[r]);
      seen[r] = true;
    }
  CHECK_THROWS_AS(make_indexing(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(make_indexing(2, 0), std::invalid_argument);
}

TEST_CASE("labeling point is the indicator outer product") {
  const PseudoDistribution a = PseudoDistribution::from_labeling({0}, 2);
  CHECK(a.entries(0, 0) == 1.0);
  CHECK(a.entries(0, 1) == 0.0);
  CHECK(a.entries(1, 0) == 0.0);
  CHECK(a.entries(1, 1) == 0.0);

  const PseudoDistribution b = PseudoDistribution::from_labeling({0, 1}, 2);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      const bool on = (r == 0 || r == 3) && (c == 0 || c == 3);
      CHECK(b.entries(r, c) == (on ? 1.0 : 0.0));
    }

  const PseudoDistribution g = PseudoDistribution::from_labeling({0, 0, 1}, 2);
  Eigen::MatrixXd b01 = g.entries.block(0, 2, 2, 2);
  CHECK(b01(0, 0) == 1.0);
  CHECK(b01.sum() == 1.0);
  Eigen::MatrixXd b02 = g.entries.block(0, 4, 2, 2);
  CHECK(b02(0, 1) == 1.0);
  CHECK(b02.sum() == 1.0);
}

TEST_CASE("labeling points are rank one with trace n and exactly feasible") {
  std::mt19937_64 rng = stream_rng(11, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + uniform_index(rng, 4);
    const int k = 2 + uniform_index(rng, 3);
    const std::vector<int> labels = random_labeling(n, k, rng);
    const PseudoDistribution a = PseudoDistribution::from_labeling(labels, k);
    CHECK(a.entries.trace() == doctest::Approx(n).epsilon(1e-15));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.entries,
                                                      Eigen::EigenvaluesOnly);
    int nonzero = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      if (std::abs(es.eigenvalues()[i]) > 1e-9) ++nonzero;
    CHECK(nonzero == 1);
    CHECK(check_feasibility(a.entries, a.indexing, 0.0).pass);
  }
  CHECK_THROWS_AS(PseudoDistribution::from_labeling({0, 2}, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(PseudoDistribution::from_labeling({-1}, 2),
                  std::invalid_argument);
}

TEST_CASE("uniform point structure and spectrum") {
  const PseudoDistribution u1 = PseudoDistribution::uniform(1, 2);
  CHECK(u1.entries(0, 0) == 0.5);
  CHECK(u1.entries(0, 1) == 0.0);
  CHECK(u1.entries(1, 1) == 0.5);

  const PseudoDistribution u = PseudoDistribution::uniform(2, 2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(u.entries,
                                                    Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  CHECK(ev[0] == doctest::Approx(0.0).epsilon(0).scale(1e-12));
  CHECK(ev[1] == doctest::Approx(0.5));
  CHECK(ev[2] == doctest::Approx(0.5));
  CHECK(ev[3] == doctest::Approx(1.0));

  for (auto [n, k] : {std::pair{2, 2}, std::pair{3, 3}, std::pair{4, 2}}) {
    const PseudoDistribution w = PseudoDistribution::uniform(n, k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        CHECK(w.entries.block(i * k, j * k, k, k).sum() ==
              doctest::Approx(1.0).epsilon(1e-15));
    CHECK(check_feasibility(w.entries, w.indexing, 1e-12).pass);
  }
  CHECK_THROWS_AS(PseudoDistribution::uniform(2, 1), std::invalid_argument);
}

TEST_CASE("feasibility report localizes constructed violations") {
  const PseudoDistribution u = PseudoDistribution::uniform(2, 2);
  CHECK(check_feasibility(u.entries, u.indexing, 1e-9).pass);

  Eigen::MatrixXd broken = PseudoDistribution::from_labeling({0, 1}, 2).entries;
  broken(0, 3) -= 0.1;
  broken(3, 0) -= 0.1;
  const FeasibilityReport rep =
      check_feasibility(broken, u.indexing, 1e-9);
  CHECK_FALSE(rep.pass);
  CHECK(rep.max_block_sum_deviation == doctest::Approx(0.1));

  const FeasibilityReport neg =
      check_feasibility(-Eigen::MatrixXd::Identity(4, 4), u.indexing, 1e-9);
  CHECK_FALSE(neg.pass);
  CHECK(neg.min_eigenvalue == doctest::Approx(-1.0));
  CHECK(neg.max_block_sum_deviation >= 1.0);

  CHECK_THROWS_AS(check_feasibility(Eigen::MatrixXd::Zero(3, 3), u.indexing,
                                    1e-9),
                  std::invalid_argument);
}

TEST_CASE("served blocks are normalized distributions") {
  const PseudoDistribution a = PseudoDistribution::from_labeling({0, 1}, 2);
  Eigen::MatrixXd b = extract_block(a, 0, 1);
  CHECK(b(0, 1) == 1.0);
  CHECK(b.sum() == doctest::Approx(1.0).epsilon(1e-15));

  const PseudoDistribution u = PseudoDistribution::uniform(3, 2);
  Eigen::MatrixXd c = extract_block(u, 0, 2);
  for (int r = 0; r < 2; ++r)
    for (int s = 0; s < 2; ++s) CHECK(c(r, s) == doctest::Approx(0.25));

  Eigen::MatrixXd d = extract_block(a, 0, 0);
  CHECK(d(0, 0) == doctest::Approx(1.0));
  CHECK(d(1, 1) == doctest::Approx(0.0).scale(1e-12));

  std::mt19937_64 rng = stream_rng(12, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const LabelIndexing ix{3, 3};
    const Eigen::MatrixXd m = random_symmetric(ix.size(), rng, 1.0);
    const Eigen::MatrixXd blk = extract_block(m, ix, 1, 2);
    CHECK(blk.minCoeff() >= 0.0);
    CHECK(std::abs(blk.sum() - 1.0) <= 1e-14);
  }
  CHECK_THROWS_AS(extract_block(a, 0, 2), std::out_of_range);
}

TEST_CASE("cone projection clamps the spectrum") {
  std::mt19937_64 rng = stream_rng(13, 0);
  const Eigen::MatrixXd psd = random_psd(5, rng, 0.1);
  CHECK((project_psd(psd) - psd).norm() <= 1e-10);

  Eigen::MatrixXd d(2, 2);
  d << 1, 0, 0, -1;
  Eigen::MatrixXd pd = project_psd(d);
  CHECK(pd(0, 0) == doctest::Approx(1.0));
  CHECK(pd(1, 1) == doctest::Approx(0.0).scale(1e-12));

  Eigen::MatrixXd off(2, 2);
  off << 0, 1, 1, 0;
  Eigen::MatrixXd poff = project_psd(off);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) CHECK(poff(r, c) == doctest::Approx(0.5));

  CHECK_THROWS_AS(project_psd(Eigen::MatrixXd::Zero(2, 3)),
                  std::invalid_argument);
}

TEST_CASE("simplex projection matches exhaustive-support oracle") {
  const Eigen::VectorXd bary = project_simplex(Eigen::VectorXd::Zero(4));
  for (int i = 0; i < 4; ++i) CHECK(bary[i] == doctest::Approx(0.25));

  Eigen::VectorXd spike(4);
  spike << 2, 0, 0, 0;
  const Eigen::VectorXd ps = project_simplex(spike);
  CHECK(ps[0] == doctest::Approx(1.0));
  CHECK(ps.tail(3).cwiseAbs().maxCoeff() <= 1e-15);

  std::mt19937_64 rng = stream_rng(14, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int dim = 2; dim <= 6; ++dim)
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::VectorXd y(dim);
      for (int i = 0; i < dim; ++i) y[i] = 2.0 * normal(rng);
      const Eigen::VectorXd got = project_simplex(y);
      const Eigen::VectorXd want =
          testsupport::simplex_project_exhaustive(y);
      CHECK((got - want).norm() <= 1e-12);
      CHECK(got.minCoeff() >= 0.0);
      CHECK(got.sum() == doctest::Approx(1.0).epsilon(1e-12));
    }

  CHECK_THROWS_AS(project_simplex(Eigen::VectorXd()), std::invalid_argument);
  CHECK_THROWS_AS(project_simplex(spike, 0.0), std::invalid_argument);
}

TEST_CASE("block projection enforces every block constraint exactly") {
  const LabelIndexing ix{2, 2};
  std::mt19937_64 rng = stream_rng(15, 0);

  const PseudoDistribution feas = random_feasible_mixture(ix, rng);
  CHECK((project_blocks(feas.entries, ix) - feas.entries).norm() <= 1e-14);

  const Eigen::MatrixXd z = project_blocks(Eigen::MatrixXd::Zero(4, 4), ix);
  CHECK(z(0, 0) == doctest::Approx(0.5));
  CHECK(z(0, 1) == doctest::Approx(0.0).scale(1e-15));
  for (int r = 0; r < 2; ++r)
    for (int c = 2; c < 4; ++c) CHECK(z(r, c) == doctest::Approx(0.25));

  Eigen::MatrixXd spike = Eigen::MatrixXd::Zero(4, 4);
  spike(0, 2) = 2.0;
  spike(2, 0) = 2.0;
  const Eigen::MatrixXd p = project_blocks(spike, ix);
  CHECK(p(0, 2) == doctest::Approx(1.0));
  CHECK(p(0, 3) == doctest::Approx(0.0).scale(1e-15));
  Eigen::VectorXd flat(4);
  flat << 2, 0, 0, 0;
  const Eigen::VectorXd oracle = testsupport::simplex_project_exhaustive(flat);
  CHECK(p(0, 2) == doctest::Approx(oracle[0]));

  for (int trial = 0; trial < 20; ++trial) {
    const LabelIndexing jx{3, 3};
    const Eigen::MatrixXd m = random_symmetric(jx.size(), rng, 2.0);
    const Eigen::MatrixXd out = project_blocks(m, jx);
    const FeasibilityReport rep = check_feasibility(out, jx, 1e-12);
    CHECK(rep.max_block_sum_deviation <= 1e-12);
    CHECK(rep.max_diag_off_diagonal == 0.0);
    CHECK(rep.min_block_entry >= 0.0);
    CHECK(rep.symmetry_violation <= 1e-15);
  }
}

TEST_CASE("feasible points are fixed by the full projection") {
  const PseudoDistribution u = PseudoDistribution::uniform(2, 2);
  CHECK((project_feasible(u.entries, u.indexing).entries - u.entries).norm() <=
        1e-8);
  const PseudoDistribution v = PseudoDistribution::from_labeling({0, 1}, 2);
  CHECK((project_feasible(v.entries, v.indexing).entries - v.entries).norm() <=
        1e-8);
}

TEST_CASE("projection of a perturbed vertex matches the pattern-search oracle") {
  const LabelIndexing ix{2, 2};
  Eigen::MatrixXd m = 0.9 * PseudoDistribution::from_labeling({0, 1}, 2).entries;
  m(0, 2) += 0.05;
  m(2, 0) += 0.05;
  const PseudoDistribution proj = project_feasible(m, ix);
  const Eigen::Matrix4d oracle = testsupport::project_oracle_2x2(m);
  const double d_proj = (m - proj.entries).norm();
  const double d_oracle = (m - Eigen::MatrixXd(oracle)).norm();
  CHECK(std::abs(d_proj - d_oracle) <= 1e-4);
  CHECK(check_feasibility(proj.entries, ix, 1e-7).pass);

  std::mt19937_64 rng = stream_rng(16, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd r = PseudoDistribution::uniform(2, 2).entries +
                              random_symmetric(4, rng, 0.8);
    const PseudoDistribution pr = project_feasible(r, ix);
    const double dp = (r - pr.entries).norm();
    const double dq = (r - Eigen::MatrixXd(testsupport::project_oracle_2x2(r)))
                          .norm();
    CHECK(dp <= dq + 1e-4);
    CHECK(dq <= dp + 1e-4);
  }
}

TEST_CASE("projection output is feasible and idempotent") {
  std::mt19937_64 rng = stream_rng(17, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + uniform_index(rng, 3);  // 2..4
    const int k = 2 + uniform_index(rng, 2);  // 2..3
    const LabelIndexing ix{n, k};
    const double scale = (trial % 2 == 0) ? 0.5 : 1.5;
    const Eigen::MatrixXd m = PseudoDistribution::uniform(n, k).entries +
                              random_symmetric(ix.size(), rng, scale);
    const PseudoDistribution once = project_feasible(m, ix);
    CHECK(check_feasibility(once.entries, ix, 10.0 * kDykstraTol).pass);
    const PseudoDistribution twice = project_feasible(once.entries, ix);
    CHECK((twice.entries - once.entries).norm() <= 10.0 * kDykstraTol);
  }
}

TEST_CASE("projection beats random feasible competitors in distance") {
  std::mt19937_64 rng = stream_rng(18, 0);
  for (auto [n, k] : {std::pair{2, 2}, std::pair{3, 2}, std::pair{2, 3}}) {
    const LabelIndexing ix{n, k};
    for (int input = 0; input < 4; ++input) {
      const Eigen::MatrixXd m =
          PseudoDistribution::uniform(n, k).entries +
          random_symmetric(ix.size(), rng, input % 2 == 0 ? 0.5 : 1.5);
      const PseudoDistribution proj = project_feasible(m, ix);
      const double d = (m - proj.entries).norm();
      for (int comp = 0; comp < 1000; ++comp) {
        const PseudoDistribution x = random_feasible_mixture(ix, rng);
        CHECK(d <= (m - x.entries).norm() + 1e-4);
      }
    }
  }
}

TEST_CASE("midpoints of feasible points stay feasible") {
  std::mt19937_64 rng = stream_rng(19, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + uniform_index(rng, 3);
    const int k = 2 + uniform_index(rng, 2);
    const LabelIndexing ix{n, k};
    const PseudoDistribution a = random_feasible_mixture(ix, rng);
    const PseudoDistribution b = random_projected_feasible(ix, rng);
    const Eigen::MatrixXd mid = 0.5 * (a.entries + b.entries);
    CHECK(check_feasibility(mid, ix, 1e-10).pass);
  }
}

TEST_CASE("exhausted iteration budget raises an error carrying the iterate") {
  const LabelIndexing ix{3, 2};
  std::mt19937_64 rng = stream_rng(20, 0);
  const Eigen::MatrixXd m = PseudoDistribution::uniform(3, 2).entries +
                            random_symmetric(ix.size(), rng, 1.0);
  try {
    project_feasible(m, ix, 1e-10, 2);
    FAIL("expected a convergence error");
  } catch (const ConvergenceError& e) {
    CHECK(e.last_iterate.rows() == ix.size());
    CHECK(e.residual >= 0.0);
  }
  DykstraOptions bad;
  bad.tol = -1.0;
  CHECK_THROWS_AS(dykstra_project(m, ix, bad), std::invalid_argument);
  Eigen::MatrixXd inf = m;
  inf(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(dykstra_project(inf, ix), std::invalid_argument);
}

}  // TEST_SUITE
