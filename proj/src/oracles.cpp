#include "locpred/oracles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "locpred/engine.hpp"
#include "locpred/errors.hpp"
#include "locpred/rng.hpp"
#include "locpred/sampling.hpp"

namespace locpred {

namespace {

long checked_labeling_count(int n, int k) {
  if (n < 1 || k < 2)
    throw std::invalid_argument("labeling enumeration: need n >= 1, k >= 2");
  long count = 1;
  for (int i = 0; i < n; ++i) {
    count *= k;
    if (static_cast<double>(count) > kBruteForceCap)
      throw SizeCapError("labeling enumeration: k^n exceeds cap of " +
                         std::to_string(static_cast<long>(kBruteForceCap)));
  }
  return count;
}

void validate_transcript(const Transcript& tr) {
  if (tr.n < 1 || tr.k < 2)
    throw std::invalid_argument("transcript: need n >= 1, k >= 2");
  for (const TranscriptRound& r : tr.rounds) {
    if (r.query.i < 0 || r.query.i >= tr.n || r.query.j < 0 ||
        r.query.j >= tr.n)
      throw std::invalid_argument("transcript: query outside [0, n)");
    if (r.payoff.rows() != tr.k || r.payoff.cols() != tr.k)
      throw std::invalid_argument("transcript: payoff must be k x k");
  }
}

}  // namespace

BruteForceResult brute_force_opt(const Transcript& transcript) {
  validate_transcript(transcript);
  const int n = transcript.n;
  const int k = transcript.k;
  const long total = checked_labeling_count(n, k);

  std::vector<int> labels(n, 0);
  BruteForceResult best;
  best.labeling = labels;
  best.value = -std::numeric_limits<double>::infinity();
  for (long idx = 0; idx < total; ++idx) {
    double value = 0.0;
    for (const TranscriptRound& r : transcript.rounds)
      value += r.payoff(labels[r.query.i], labels[r.query.j]);
    // Strict improvement keeps the lexicographically smallest maximizer
    // (labels[0] most significant in the enumeration order).
    if (value > best.value) {
      best.value = value;
      best.labeling = labels;
    }
    for (int pos = n - 1; pos >= 0; --pos) {
      if (++labels[pos] < k) break;
      labels[pos] = 0;
    }
  }
  return best;
}

LabelingTracker::LabelingTracker(int n, int k) : n_(n), k_(k) {
  const long total = checked_labeling_count(n, k);
  totals_.assign(total, 0.0);
  divisor_.assign(n, 1);
  for (int i = n - 2; i >= 0; --i) divisor_[i] = divisor_[i + 1] * k;
}

void LabelingTracker::add_round(const RoundQuery& query,
                                const PayoffMatrix& payoff) {
  if (query.i < 0 || query.i >= n_ || query.j < 0 || query.j >= n_)
    throw std::invalid_argument("labeling tracker: query outside [0, n)");
  if (payoff.rows() != k_ || payoff.cols() != k_)
    throw std::invalid_argument("labeling tracker: payoff must be k x k");
  const long di = divisor_[query.i];
  const long dj = divisor_[query.j];
  double best = -std::numeric_limits<double>::infinity();
  for (long idx = 0; idx < static_cast<long>(totals_.size()); ++idx) {
    const int a = static_cast<int>((idx / di) % k_);
    const int b = static_cast<int>((idx / dj) % k_);
    totals_[idx] += payoff(a, b);
    best = std::max(best, totals_[idx]);
  }
  best_ = best;
  ++rounds_;
}

double pseudodist_opt_desk(const Transcript& transcript) {
  validate_transcript(transcript);
  const LabelIndexing ix{transcript.n, transcript.k};
  if (ix.size() > 8)
    throw SizeCapError("pseudodist_opt_desk: nk > 8 (" +
                       std::to_string(ix.size()) + ")");

  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(ix.size(), ix.size());
  for (const TranscriptRound& r : transcript.rounds)
    accumulate_payoff_in_place(g, ix, r.query, r.payoff);

  const double eta = 1e4;
  InnerSolverConfig config;
  // The gradient-mapping scale grows with eta ||G||; keep the stopping
  // rule proportional so the payoff value converges to ~1e-4 absolute.
  config.grad_map_tol = kGradMapTol * (1.0 + eta * g.norm());

  auto value_from = [&](const PseudoDistribution& start) {
    const SolveResult r = solve_inner(g, eta, start, config);
    return g.cwiseProduct(r.solution.entries).sum();
  };

  double best = value_from(PseudoDistribution::uniform(ix.n, ix.k));
  std::mt19937_64 rng(splitmix64(0x0d35c0f21a64b872ull));
  for (int s = 0; s < 20; ++s)
    best = std::max(best, value_from(random_feasible_mixture(ix, rng)));
  return best;
}

RegretReport measure_regret(const Transcript& transcript,
                            const std::vector<double>& engine_payoffs) {
  validate_transcript(transcript);
  if (engine_payoffs.size() != transcript.rounds.size())
    throw std::invalid_argument(
        "measure_regret: payoff count does not match transcript length");
  RegretReport report;
  report.opt_value = brute_force_opt(transcript).value;
  for (double p : engine_payoffs) report.cumulative_payoff += p;
  report.regret = report.opt_value - report.cumulative_payoff;
  const double t = static_cast<double>(transcript.rounds.size());
  if (t > 0) {
    const double n = transcript.n;
    const double k = transcript.k;
    report.ratio_nk3 = report.regret / std::sqrt(n * k * k * k * t);
    report.ratio_nk = report.regret / std::sqrt(n * k * t);
  }
  return report;
}

}  // namespace locpred
