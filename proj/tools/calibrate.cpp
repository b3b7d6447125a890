// Produces the frozen constants: concavity coefficients for the
// verification suites (halving from 1/16 until a large seeded trial block
// runs clean) and the regret constant for the planted-cut benchmark.
#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "locpred/harness.hpp"
#include "locpred/verify.hpp"

namespace {

using SuiteFn = std::vector<locpred::SuiteReport> (*)(long, std::uint64_t,
                                                      double);

double calibrate_coefficient(const char* name, SuiteFn suite, long trials,
                             std::uint64_t seed) {
  double c = 1.0 / 16.0;
  for (;;) {
    const auto reports = suite(trials, seed, c);
    const long violations = locpred::total_violations(reports);
    double worst = 0.0;
    for (const auto& r : reports) worst = std::min(worst, r.worst_margin);
    std::cout << name << " c=" << c << " trials=" << trials
              << " violations=" << violations << " worst=" << worst << '\n';
    if (violations == 0) return c;
    c *= 0.5;
  }
}

void check_holdout(const char* name, SuiteFn suite, double c, long trials) {
  for (std::uint64_t seed : {2ull, 3ull, 4ull}) {
    const long violations =
        locpred::total_violations(suite(trials, seed, c));
    std::cout << name << " holdout seed=" << seed << " c=" << c
              << " violations=" << violations << '\n';
  }
}

locpred::ExperimentConfig planted_cut_benchmark(long horizon) {
  locpred::ExperimentConfig config;
  config.adversary.kind = locpred::AdversaryKind::kPlanted;
  config.adversary.problem = locpred::Problem::kMaxcut;
  config.adversary.n = 6;
  config.adversary.k = 2;
  config.adversary.noise = 0.1;
  config.adversary.planted = {0, 1, 0, 1, 0, 1};
  config.engine.n = 6;
  config.engine.k = 2;
  config.engine.horizon = horizon;
  return config;
}

void regret_block(const char* name, std::uint64_t first_seed, int count,
                  long horizon) {
  locpred::ExperimentConfig config = planted_cut_benchmark(horizon);
  config.adversary.seed = first_seed;
  config.replicates = count;
  const auto summaries = locpred::run_replicates(config);

  const double norm = std::sqrt(6.0 * 8.0 * static_cast<double>(horizon));
  double sum_ratio = 0.0, max_ratio = 0.0, min_tail = 1.0;
  long inexact = 0;
  for (const auto& s : summaries) {
    const double ratio = s.final_regret / norm;
    sum_ratio += ratio;
    max_ratio = std::max(max_ratio, ratio);
    inexact += s.inexact_solves;
    double tail = 0.0;
    const size_t tail_len = std::min<size_t>(100, s.rows.size());
    for (size_t r = s.rows.size() - tail_len; r < s.rows.size(); ++r)
      tail += s.rows[r].payoff;
    min_tail = std::min(min_tail, tail / static_cast<double>(tail_len));
  }
  std::cout << name << " seeds=" << first_seed << "+" << count
            << " T=" << horizon
            << " mean_ratio=" << sum_ratio / count
            << " max_ratio=" << max_ratio
            << " min_tail100=" << min_tail
            << " inexact=" << inexact << '\n';
}

void sweep_preview(std::uint64_t first_seed, int count) {
  locpred::ExperimentConfig base = planted_cut_benchmark(1);
  base.adversary.seed = first_seed;
  std::vector<std::uint64_t> seeds;
  for (int s = 0; s < count; ++s) seeds.push_back(first_seed + s);
  const auto cells =
      locpred::run_sweep(base, {250, 500, 1000}, seeds, 0);
  double mean250 = 0.0, mean1000 = 0.0;
  for (const auto& cell : cells) {
    if (!cell.ok) {
      std::cout << "sweep cell failed: " << cell.error << '\n';
      continue;
    }
    if (cell.horizon == 250) mean250 += cell.summary.final_regret;
    if (cell.horizon == 1000) mean1000 += cell.summary.final_regret;
  }
  mean250 /= count;
  mean1000 /= count;
  std::cout << "sweep mean_regret T=250: " << mean250
            << " T=1000: " << mean1000
            << " ratio=" << mean1000 / mean250 << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "all";
  const long trials = argc > 2 ? std::stol(argv[2]) : 100000;

  if (mode == "lemmas" || mode == "all") {
    const double c_tv =
        calibrate_coefficient("tv", locpred::run_tv_suite, trials, 1);
    const double c_logdet =
        calibrate_coefficient("logdet", locpred::run_logdet_suite, trials, 1);
    const double c_payoff = calibrate_coefficient(
        "payoff", locpred::run_regularizer_suite, trials, 1);
    check_holdout("tv", locpred::run_tv_suite, c_tv, trials / 10);
    check_holdout("logdet", locpred::run_logdet_suite, c_logdet, trials / 10);
    check_holdout("payoff", locpred::run_regularizer_suite, c_payoff,
                  trials / 10);
    std::cout << "pin kTvLowerBoundCoeff=" << c_tv
              << " kLogdetConcavityCoeff=" << c_logdet
              << " kPayoffConcavityCoeff=" << c_payoff << '\n';
  }
  if (mode == "regret" || mode == "all") {
    regret_block("calibration", 1, 20, 1000);
    regret_block("holdout", 101, 20, 1000);
  }
  if (mode == "sweep" || mode == "all") {
    sweep_preview(201, 20);
  }
  return 0;
}
