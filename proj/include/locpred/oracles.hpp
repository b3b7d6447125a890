#pragma once

#include <vector>

#include "locpred/constants.hpp"
#include "locpred/environments.hpp"

namespace locpred {

struct BruteForceResult {
  std::vector<int> labeling;
  double value = 0.0;
};

// Exhaustive maximum of the total transcript payoff over all k^n
// labelings.  Lexicographic enumeration (labels[0] most significant);
// strict improvement keeps the lexicographically smallest maximizer.
// Throws SizeCapError when k^n exceeds kBruteForceCap.
BruteForceResult brute_force_opt(const Transcript& transcript);

// Incremental version for per-round comparator columns: O(k^n) per round
// instead of O(k^n T) per prefix.
class LabelingTracker {
 public:
  LabelingTracker(int n, int k);  // SizeCapError when k^n > kBruteForceCap

  void add_round(const RoundQuery& query, const PayoffMatrix& payoff);
  double best() const { return best_; }
  long rounds() const { return rounds_; }

 private:
  int n_ = 0;
  int k_ = 0;
  std::vector<double> totals_;
  std::vector<long> divisor_;
  double best_ = 0.0;
  long rounds_ = 0;
};

// Best achievable total payoff over the pseudodistribution relaxation:
// solve_inner with a large learning rate from the uniform start plus 20
// random feasible restarts.  Upper-bounds brute_force_opt (dominance).
// Throws SizeCapError when nk > 8.
double pseudodist_opt_desk(const Transcript& transcript);

struct RegretReport {
  double opt_value = 0.0;
  double cumulative_payoff = 0.0;
  double regret = 0.0;
  double ratio_nk3 = 0.0;  // regret / sqrt(n k^3 T)
  double ratio_nk = 0.0;   // regret / sqrt(n k T)
};

// Regret of a realized payoff sequence against the exhaustive optimum of
// the same transcript.
RegretReport measure_regret(const Transcript& transcript,
                            const std::vector<double>& engine_payoffs);

}  // namespace locpred
