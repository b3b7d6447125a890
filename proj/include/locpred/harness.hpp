#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "locpred/engine.hpp"
#include "locpred/environments.hpp"
#include "locpred/oracles.hpp"

namespace locpred {

struct ExperimentConfig {
  AdversarySpec adversary;
  EngineConfig engine;
  int replicates = 1;
  std::string out_path;          // per-round CSV; empty = no file
  long checkpoint_every = 0;     // 0 = off
  std::string checkpoint_path;
  std::string resume_path;       // load engine state before running
};

void validate_experiment_config(const ExperimentConfig& config);

struct RoundRow {
  long round = 0;  // 1-based
  int i = 0;
  int j = 0;
  double payoff = 0.0;
  double cumulative = 0.0;
  int inexact_flag = 0;
  int sample_a = 0;
  int sample_b = 0;
  // Present only when the exhaustive comparator is within the size cap.
  double opt_cumulative = 0.0;
  double regret = 0.0;
};

struct RunSummary {
  int n = 0;
  int k = 2;
  long horizon = 0;
  std::uint64_t seed = 0;
  bool has_comparator = false;
  double cumulative_payoff = 0.0;
  double opt_value = 0.0;
  double final_regret = 0.0;
  double ratio_nk3 = 0.0;
  double ratio_nk = 0.0;
  long inexact_solves = 0;
  std::vector<RoundRow> rows;
};

// One full online run: query, predict, sample, reveal, observe, for every
// round; per-round rows carry the exhaustive comparator columns when k^n
// is within the enumeration cap.  Writes the CSV when out_path is set.
// The replicate index offsets the seed.
RunSummary run_experiment(const ExperimentConfig& config, int replicate = 0);

// All replicates of a config in parallel; replicate r uses seed + r and,
// when there are several, output files suffixed _rep<r>.
std::vector<RunSummary> run_replicates(const ExperimentConfig& config,
                                       int jobs = 0);

// CSV text for a run: header
// round,i,j,payoff,cumulative,inexact_flag,sample_a,sample_b
// plus ,opt_cumulative,regret when the comparator ran.  Deterministic:
// identical configs produce byte-identical text.
std::string run_csv(const RunSummary& summary);

// Human-readable end-of-run summary (deterministic; no timing).
std::string summary_text(const RunSummary& summary);

struct SweepCell {
  long horizon = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  RunSummary summary;
};

// Grid of runs over horizons x seeds, executed in parallel; cells are
// reported sorted by (horizon, seed) and per-cell failures are recorded,
// not fatal.
std::vector<SweepCell> run_sweep(const ExperimentConfig& base,
                                 const std::vector<long>& horizons,
                                 const std::vector<std::uint64_t>& seeds,
                                 int jobs = 0);

// CSV: T,seed,regret,ratio_nk3T,ratio_nkT,cumulative,opt_value,inexact_solves,error
std::string sweep_csv(const std::vector<SweepCell>& cells);

}  // namespace locpred
