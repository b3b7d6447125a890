#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "locpred/constants.hpp"

namespace locpred {

struct SuiteReport {
  std::string check;
  long trials = 0;
  long violations = 0;
  double worst_margin = 0.0;  // most negative observed slack
  std::string params;
};

// Randomized checks of the concavity / distance inequalities the regret
// analysis rests on.  Each returns one report per sub-check; a violation
// is a margin below -1e-12.

std::vector<SuiteReport> run_entropy_suite(long trials, std::uint64_t seed,
                                           double c = kEntropyConcavityCoeff);
std::vector<SuiteReport> run_tv_suite(long trials, std::uint64_t seed,
                                      double c = kTvLowerBoundCoeff);
std::vector<SuiteReport> run_logdet_suite(long trials, std::uint64_t seed,
                                          double c = kLogdetConcavityCoeff);
std::vector<SuiteReport> run_regularizer_suite(long trials, std::uint64_t seed,
                                               double c = kPayoffConcavityCoeff);
// Projection correctness: feasibility, idempotence and optimality of
// dykstra_project against random feasible competitors.
std::vector<SuiteReport> run_projection_suite(long trials, std::uint64_t seed);

// Runs the named suite ("all", "entropy", "tv", "logdet", "regularizer",
// "projection"); c < 0 means per-suite default.  Returns all reports.
std::vector<SuiteReport> run_suite(const std::string& name, long trials,
                                   std::uint64_t seed, double c = -1.0);

long total_violations(const std::vector<SuiteReport>& reports);
void print_reports(std::ostream& out, const std::vector<SuiteReport>& reports);

}  // namespace locpred
