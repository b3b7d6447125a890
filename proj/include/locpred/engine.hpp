#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <utility>

#include "locpred/constants.hpp"
#include "locpred/environments.hpp"
#include "locpred/pseudodist.hpp"

namespace locpred {

// Learning rate sqrt(n / (k T)) balancing the regularizer range n k
// against the payoff curvature 1/k^2 over horizon T.
double eta_for_horizon(int n, int k, long horizon);

// Folds one revealed payoff into the cumulative gradient G: half the
// table onto block (i,j) and half transposed onto (j,i), so that
// <G, A> accumulates payoff_value(extract_block(A,i,j), payoff).
Eigen::MatrixXd accumulate_payoff(const Eigen::MatrixXd& g,
                                  const LabelIndexing& indexing,
                                  const RoundQuery& query,
                                  const PayoffMatrix& payoff);
void accumulate_payoff_in_place(Eigen::MatrixXd& g,
                                const LabelIndexing& indexing,
                                const RoundQuery& query,
                                const PayoffMatrix& payoff);

struct InnerSolverConfig {
  int max_outer = kSolverMaxOuter;
  double grad_map_tol = kGradMapTol;
  double initial_step = kLineSearchInitialStep;
  double shrink = kLineSearchShrink;
  double sufficient_increase = kLineSearchSufficientIncrease;
  int max_line_search_trials = kLineSearchMaxTrials;
  DykstraOptions dykstra;
};

struct SolveResult {
  PseudoDistribution solution;
  // Stationarity was certified at the gradient-mapping tolerance by a
  // settled projection, and the returned iterate itself came from a
  // projection within the feasibility budget.
  bool exact = true;
  int iterations = 0;
  double grad_map_norm = 0.0;
};

// Maximizes F(A) = eta <G, A> + R(A) over the feasible set by projected
// gradient ascent with backtracking line search, warm-started.  Monotone:
// F(solution) >= F(warm_start) - 1e-12.  The line search only adopts
// candidates whose projection settled within the feasibility budget;
// stalled projections shrink the step instead.  Termination without a
// certified small gradient mapping (iteration cap, no acceptable step)
// returns the best iterate flagged inexact instead of failing.
SolveResult solve_inner(const Eigen::MatrixXd& g, double eta,
                        const PseudoDistribution& warm_start,
                        const InnerSolverConfig& config = {});

struct EngineConfig {
  int n = 0;
  int k = 2;
  long horizon = 1;          // 0 => anytime mode (doubling eta schedule)
  double eta = 0.0;          // 0 => sqrt(n / (k * horizon))
  int resolve_cadence = 1;   // re-solve every this many observed rounds
  std::uint64_t seed = 0;
  InnerSolverConfig solver;
};

void validate_engine_config(const EngineConfig& config);

// Follow-the-regularized-leader over pseudodistributions.  predict() is
// the block of the solution computed from all previously observed rounds;
// observe() records a revealed payoff and re-solves at the configured
// cadence, warm-started from the current solution.
class Engine {
 public:
  explicit Engine(const EngineConfig& config);

  // Label distribution served for the queried pair.
  Eigen::MatrixXd predict(const RoundQuery& query) const;

  // Draws one (a, b) label pair from a served distribution.
  std::pair<int, int> sample(const Eigen::MatrixXd& dist);

  void observe(const RoundQuery& query, const PayoffMatrix& payoff);

  const EngineConfig& config() const { return config_; }
  const LabelIndexing& indexing() const { return indexing_; }
  const PseudoDistribution& solution() const { return solution_; }
  const Eigen::MatrixXd& cumulative_gradient() const { return gradient_; }
  long round() const { return round_; }
  double cumulative_payoff() const { return cumulative_payoff_; }
  long inexact_solves() const { return inexact_solves_; }
  bool last_solve_exact() const { return last_solve_exact_; }
  double effective_eta() const;

  // Text checkpoint of (round, counters, G, A); sampling state is not
  // persisted, so resumed runs replay payoffs identically but may sample
  // different label pairs.
  void save_checkpoint(std::ostream& out) const;
  static Engine load_checkpoint(std::istream& in, const EngineConfig& config);

 private:
  void resolve();

  EngineConfig config_;
  LabelIndexing indexing_;
  Eigen::MatrixXd gradient_;
  PseudoDistribution solution_;
  long round_ = 0;
  double cumulative_payoff_ = 0.0;
  long inexact_solves_ = 0;
  bool last_solve_exact_ = true;
  std::mt19937_64 sampler_;
};

// Inverse-CDF draw over the entries of a k x k distribution (row-major).
std::pair<int, int> sample_pair(const Eigen::MatrixXd& dist,
                                std::mt19937_64& rng);

}  // namespace locpred
