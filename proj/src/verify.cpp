#include "locpred/verify.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "locpred/environments.hpp"
#include "locpred/lemmas.hpp"
#include "locpred/regularizer.hpp"
#include "locpred/rng.hpp"
#include "locpred/sampling.hpp"
#include "locpred/textio.hpp"

namespace locpred {

namespace {

constexpr double kViolationTol = -1e-12;

struct MarginTracker {
  long trials = 0;
  long violations = 0;
  double worst = std::numeric_limits<double>::infinity();

  void add(double margin) {
    ++trials;
    worst = std::min(worst, margin);
    if (margin < kViolationTol) ++violations;
  }

  SuiteReport report(const std::string& check, const std::string& params) const {
    SuiteReport r;
    r.check = check;
    r.trials = trials;
    r.violations = violations;
    r.worst_margin = trials ? worst : 0.0;
    r.params = params;
    return r;
  }
};

double clamp_eps(double u) { return std::clamp(u, 1e-6, 1.0 - 1e-6); }

// Random PD matrix with eigenvalues in [lo, hi].
Eigen::MatrixXd random_pd_conditioned(int d, std::mt19937_64& rng, double lo,
                                      double hi) {
  Eigen::MatrixXd q = random_symmetric(d, rng);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
  Eigen::VectorXd lam(d);
  for (int i = 0; i < d; ++i) lam(i) = uniform_range(rng, lo, hi);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double spectral_radius(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Mean-zero two-component mixture whose covariance is exactly `target`.
GaussianMixture random_matched_mixture(const Eigen::MatrixXd& target,
                                       std::mt19937_64& rng) {
  const int d = static_cast<int>(target.rows());
  const double lam_min = min_eigenvalue(target);
  Eigen::VectorXd mu(d);
  for (int i = 0; i < d; ++i) mu(i) = normal01(rng);
  const double norm = mu.norm();
  if (norm > 0.0)
    mu *= std::sqrt(uniform01(rng) * 0.5 * lam_min) / norm;

  GaussianMixture mix;
  mix.w = 0.5;
  mix.mu1 = mu;
  mix.mu2 = -mu;
  const Eigen::MatrixXd common = target - mu * mu.transpose();
  Eigen::MatrixXd d_part = random_symmetric(d, rng);
  const double radius = spectral_radius(d_part);
  if (radius > 0.0)
    d_part *= 0.4 * min_eigenvalue(common) * uniform01(rng) / radius;
  mix.s1 = common - d_part;
  mix.s2 = common + d_part;
  return mix;
}

}  // namespace

std::vector<SuiteReport> run_entropy_suite(long trials, std::uint64_t seed,
                                           double c) {
  std::mt19937_64 rng = stream_rng(seed, 0xe117u);
  MarginTracker concavity;
  for (long t = 0; t < trials; ++t) {
    const int m = 2 + uniform_index(rng, 19);  // supports 2..20
    const std::vector<double> p = random_distribution(m, rng);
    const std::vector<double> q = random_distribution(m, rng);
    const double eps = clamp_eps(uniform01(rng));
    concavity.add(entropy_concavity_gap(p, q, eps, c));
  }

  // Gaussian side: quadrature vs closed form, and mixtures with matched
  // covariance must not exceed the gaussian entropy.
  MarginTracker gaussian;
  const long mixtures = std::clamp<long>(trials / 200, 2, 50);
  const long pure = std::clamp<long>(trials / 2000, 2, 6);
  for (long t = 0; t < pure; ++t) {
    const int d = 1 + static_cast<int>(t % 2);
    const Eigen::MatrixXd sigma = random_pd_conditioned(d, rng, 0.5, 2.0);
    const double quad = gaussian_entropy_quadrature(sigma);
    const double closed = gaussian_entropy_closed_form(sigma);
    gaussian.add(1e-3 - std::abs(quad - closed));
  }
  for (long t = 0; t < mixtures; ++t) {
    const int d = 1 + static_cast<int>(t % 2);
    const Eigen::MatrixXd target = random_pd_conditioned(d, rng, 0.5, 2.0);
    const GaussianMixture mix = random_matched_mixture(target, rng);
    const double h_mix = mixture_entropy_quadrature(mix);
    const double h_gauss = gaussian_entropy_closed_form(target);
    gaussian.add(h_gauss + 1e-3 - h_mix);
  }

  std::ostringstream params;
  params << "c=" << c << " supports=2..20";
  std::ostringstream gparams;
  gparams << "pure=" << pure << " mixtures=" << mixtures << " dims=1,2";
  return {concavity.report("entropy-concavity", params.str()),
          gaussian.report("gaussian-max-entropy", gparams.str())};
}

std::vector<SuiteReport> run_tv_suite(long trials, std::uint64_t seed,
                                      double c) {
  std::mt19937_64 rng = stream_rng(seed, 0x0774u);
  MarginTracker bound;
  for (long t = 0; t < trials; ++t) {
    const int d = 2 + uniform_index(rng, 5);  // dims 2..6
    const Eigen::MatrixXd s1 = random_psd(d, rng);
    const Eigen::MatrixXd s2 = random_psd(d, rng);
    const int i = uniform_index(rng, d);
    int j = uniform_index(rng, d - 1);
    if (j >= i) ++j;
    const double s = s1(i, i) + s1(j, j) + s2(i, i) + s2(j, j);
    const double delta = std::abs(s1(i, j) - s2(i, j)) / s;
    bound.add(gaussian_tv_lower_bound(s1, s2, i, j) - c * delta);
  }

  // The characteristic-function bound must sit below the true distance.
  MarginTracker oracle;
  const long pairs = std::clamp<long>(trials / 50, 1, 200);
  for (long t = 0; t < pairs; ++t) {
    const int d = 1 + static_cast<int>(t % 2);
    const Eigen::MatrixXd s1 = random_pd_conditioned(d, rng, 0.4, 2.5);
    const Eigen::MatrixXd s2 = random_pd_conditioned(d, rng, 0.4, 2.5);
    const int i = d == 1 ? 0 : uniform_index(rng, d);
    int j = i;
    if (d > 1) {
      j = uniform_index(rng, d - 1);
      if (j >= i) ++j;
    }
    const double lower = gaussian_tv_lower_bound(s1, s2, i, j);
    const double tv = gaussian_tv_grid(s1, s2);
    oracle.add(tv + 1e-3 - lower);
  }

  std::ostringstream params;
  params << "c=" << c << " dims=2..6";
  std::ostringstream oparams;
  oparams << "pairs=" << pairs << " dims=1,2 grid=2000";
  return {bound.report("tv-characteristic-bound", params.str()),
          oracle.report("tv-grid-oracle", oparams.str())};
}

std::vector<SuiteReport> run_logdet_suite(long trials, std::uint64_t seed,
                                          double c) {
  std::mt19937_64 rng = stream_rng(seed, 0x10fdu);
  MarginTracker concavity;
  for (long t = 0; t < trials; ++t) {
    const int d = 2 + uniform_index(rng, 5);  // dims 2..6
    const Eigen::MatrixXd s1 = random_psd(d, rng, 0.05);
    const Eigen::MatrixXd s2 = random_psd(d, rng, 0.05);
    const int i = uniform_index(rng, d);
    int j = uniform_index(rng, d - 1);
    if (j >= i) ++j;
    const double eps = clamp_eps(uniform01(rng));
    concavity.add(logdet_concavity_gap(s1, s2, i, j, eps, c));
  }
  std::ostringstream params;
  params << "c=" << c << " dims=2..6";
  return {concavity.report("logdet-concavity", params.str())};
}

std::vector<SuiteReport> run_regularizer_suite(long trials, std::uint64_t seed,
                                               double c) {
  std::mt19937_64 rng = stream_rng(seed, 0x4e9u);
  MarginTracker concavity;
  for (long t = 0; t < trials; ++t) {
    const int n = 2 + uniform_index(rng, 3);  // 2..4
    const int k = 2 + uniform_index(rng, 2);  // 2..3
    const LabelIndexing ix{n, k};
    const PseudoDistribution a = (t % 4 == 3)
                                     ? random_projected_feasible(ix, rng)
                                     : random_feasible_mixture(ix, rng);
    const PseudoDistribution b = random_feasible_mixture(ix, rng);
    RoundQuery q;
    q.i = uniform_index(rng, n);
    if (uniform01(rng) < 0.1) {
      q.j = q.i;  // diagonal queries exercise the i = j payoff path
    } else {
      q.j = uniform_index(rng, n - 1);
      if (q.j >= q.i) ++q.j;
    }
    PayoffMatrix payoff(k, k);
    for (int r = 0; r < k; ++r)
      for (int col = 0; col < k; ++col)
        payoff(r, col) = uniform_range(rng, -1.0, 1.0);
    const double eps = clamp_eps(uniform01(rng));
    concavity.add(concavity_modulus_check(a, b, q, payoff, eps, c));
  }
  std::ostringstream params;
  params << "c=" << c << " n=2..4 k=2..3";
  return {concavity.report("payoff-distance-concavity", params.str())};
}

std::vector<SuiteReport> run_projection_suite(long trials,
                                              std::uint64_t seed) {
  std::mt19937_64 rng = stream_rng(seed, 0x9201u);
  MarginTracker feasibility;
  MarginTracker idempotence;
  MarginTracker optimality;
  for (long t = 0; t < trials; ++t) {
    const int n = 2 + uniform_index(rng, 3);  // 2..4
    const int k = 2 + uniform_index(rng, 2);  // 2..3
    const LabelIndexing ix{n, k};
    const double scale = (t % 2 == 0) ? 0.5 : 1.5;
    const Eigen::MatrixXd m =
        PseudoDistribution::uniform(n, k).entries +
        random_symmetric(ix.size(), rng, scale);
    // Certify the cone gap at the stop, not just iterate settling, so the
    // output's distance to the cone is tol-sized rather than tol divided by
    // the local contraction rate.
    DykstraOptions options;
    options.gap_tol = options.tol;
    const DykstraResult proj = dykstra_project(m, ix, options);
    if (!proj.converged) {
      feasibility.add(-1.0);
      continue;
    }
    const FeasibilityReport rep = check_feasibility(proj.matrix, ix, 1e-7);
    const double worst = std::max(
        {rep.symmetry_violation, -rep.min_eigenvalue, -rep.min_block_entry,
         rep.max_block_sum_deviation, rep.max_diag_off_diagonal});
    feasibility.add(1e-7 - worst);

    const DykstraResult again = dykstra_project(proj.matrix, ix, options);
    idempotence.add(1e-7 - (again.matrix - proj.matrix).norm());

    const double dist = (m - proj.matrix).norm();
    double slack = std::numeric_limits<double>::infinity();
    for (int comp = 0; comp < 20; ++comp) {
      const PseudoDistribution x = random_feasible_mixture(ix, rng);
      slack = std::min(slack, (m - x.entries).norm() - dist);
    }
    optimality.add(slack + 1e-4);
  }
  const std::string params = "n=2..4 k=2..3 competitors=20";
  return {feasibility.report("projection-feasibility", params),
          idempotence.report("projection-idempotence", params),
          optimality.report("projection-optimality", params)};
}

std::vector<SuiteReport> run_suite(const std::string& name, long trials,
                                   std::uint64_t seed, double c) {
  auto pick = [&](double fallback) { return c >= 0.0 ? c : fallback; };
  std::vector<SuiteReport> out;
  auto append = [&](std::vector<SuiteReport> r) {
    for (SuiteReport& rep : r) out.push_back(std::move(rep));
  };
  if (name == "entropy" || name == "all")
    append(run_entropy_suite(trials, seed, pick(kEntropyConcavityCoeff)));
  if (name == "tv" || name == "all")
    append(run_tv_suite(trials, seed, pick(kTvLowerBoundCoeff)));
  if (name == "logdet" || name == "all")
    append(run_logdet_suite(trials, seed, pick(kLogdetConcavityCoeff)));
  if (name == "regularizer" || name == "all")
    append(run_regularizer_suite(trials, seed, pick(kPayoffConcavityCoeff)));
  if (name == "projection" || name == "all")
    append(run_projection_suite(trials, seed));
  if (out.empty())
    throw std::invalid_argument(
        "unknown suite '" + name +
        "' (expected all|entropy|tv|logdet|regularizer|projection)");
  return out;
}

long total_violations(const std::vector<SuiteReport>& reports) {
  long v = 0;
  for (const SuiteReport& r : reports) v += r.violations;
  return v;
}

void print_reports(std::ostream& out, const std::vector<SuiteReport>& reports) {
  for (const SuiteReport& r : reports) {
    out << "check=" << r.check << " trials=" << r.trials
        << " violations=" << r.violations
        << " worst_margin=" << format_double(r.worst_margin);
    if (!r.params.empty()) out << " params=[" << r.params << "]";
    out << '\n';
  }
}

}  // namespace locpred
