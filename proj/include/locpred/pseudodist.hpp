#pragma once

#include <Eigen/Dense>
#include <vector>

#include "locpred/constants.hpp"
#include "locpred/indexing.hpp"

namespace locpred {

// A pairwise pseudodistribution over k-labelings of n items: a symmetric,
// entrywise-nonnegative PSD matrix of k x k blocks where every block sums
// to 1 and diagonal blocks are diagonal.  Block (i,j) is the joint label
// distribution served for the pair (i,j).
struct PseudoDistribution {
  LabelIndexing indexing;
  Eigen::MatrixXd entries;

  // Deterministic point: outer product of the labeling's indicator vector.
  static PseudoDistribution from_labeling(const std::vector<int>& labels, int k);

  // Independent uniform labels: off-diagonal blocks 1/k^2, diagonal
  // blocks (1/k) I.
  static PseudoDistribution uniform(int n, int k);
};

struct FeasibilityReport {
  double symmetry_violation = 0.0;        // max |A - A^T|
  double min_eigenvalue = 0.0;            // of the symmetrized matrix
  double min_block_entry = 0.0;           // most negative entry
  double max_block_sum_deviation = 0.0;   // worst |block sum - 1|
  double max_diag_off_diagonal = 0.0;     // worst off-diagonal of a diagonal block
  bool pass = false;

  bool feasible_at(double tol) const;
};

// Measures all constraint violations of `m`; pass iff every measure is
// within `tol`.  Eigenvalues within the eigensolver's backward-error floor
// of zero are reported as zero, so exact vertices pass at tolerance 0.
FeasibilityReport check_feasibility(const Eigen::MatrixXd& m,
                                    const LabelIndexing& indexing, double tol);

// The k x k label distribution for the pair (i, j): symmetrized block,
// clamped nonnegative, renormalized to sum 1.
Eigen::MatrixXd extract_block(const Eigen::MatrixXd& m,
                              const LabelIndexing& indexing, int i, int j);
Eigen::MatrixXd extract_block(const PseudoDistribution& a, int i, int j);

// Nearest PSD matrix in Frobenius norm (eigenvalue clamp).
Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m);

// Nearest matrix satisfying the block constraints: each symmetrized
// off-diagonal block projected onto the simplex, each diagonal block onto
// diagonal matrices with trace 1.
Eigen::MatrixXd project_blocks(const Eigen::MatrixXd& m,
                               const LabelIndexing& indexing);

// Euclidean projection of y onto {x : x >= 0, sum x = total}.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& y, double total = 1.0);

struct DykstraOptions {
  double tol = kDykstraTol;
  int max_iters = kDykstraMaxIters;
  // When positive, the iteration may abort early (reporting !converged) once
  // the gap to the PSD cone has frozen above this value, i.e. the output
  // could never reach the caller's quality requirement no matter how much of
  // the budget remains.  Zero disables the shortcut.
  double quality_floor = 0.0;
  // When positive, successive-iterate settling alone does not stop the
  // iteration: the gap to the cone must also be at most this value, so the
  // returned matrix is certified that close to positive semidefinite.
  // Without it the settled iterate's cone distance is only movement-sized
  // divided by the local contraction rate, which can be orders of magnitude
  // larger than tol on hard faces.  Zero keeps the plain movement stop.
  double gap_tol = 0.0;
};

struct DykstraResult {
  Eigen::MatrixXd matrix;
  // True when successive iterates settled within tol (or the gap to the PSD
  // cone fell below tol) before the iteration cap.
  bool converged = false;
  // Frobenius distance from the returned iterate to the cone it was
  // alternated against: positive semidefiniteness together with the null
  // directions every feasible matrix shares.  An upper bound on how far the
  // result violates positive semidefiniteness alone.  Block constraints
  // hold exactly regardless.
  double residual = 0.0;
  int iterations = 0;
};

// Dykstra's alternating projections with correction terms between the PSD
// cone and the block-constraint set; converges to the exact Euclidean
// projection onto their intersection.  Terminates when successive iterates
// differ by at most tol in Frobenius norm (with gap_tol set, only once the
// iterate is also that close to the cone).  The returned iterate satisfies
// the block constraints exactly and the PSD constraint within the residual.
DykstraResult dykstra_project(const Eigen::MatrixXd& m,
                              const LabelIndexing& indexing,
                              const DykstraOptions& options = {});

// Throwing wrapper: ConvergenceError (with last iterate and residual) if
// the iteration cap is hit before the tolerance.  Requires the output to be
// within tol of the cone (gap_tol = tol), so re-projecting an output moves
// it by at most a small multiple of tol.
PseudoDistribution project_feasible(const Eigen::MatrixXd& m,
                                    const LabelIndexing& indexing,
                                    double tol = kDykstraTol,
                                    int max_iters = kDykstraMaxIters);

}  // namespace locpred
