#include "locpred/pseudodist.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "locpred/errors.hpp"

namespace locpred {

namespace {

void require_square(const Eigen::MatrixXd& m, const LabelIndexing& ix,
                    const char* where) {
  const int d = ix.size();
  if (m.rows() != d || m.cols() != d) {
    std::ostringstream msg;
    msg << where << ": expected " << d << "x" << d << " matrix for n=" << ix.n
        << " k=" << ix.k << ", got " << m.rows() << "x" << m.cols();
    throw std::invalid_argument(msg.str());
  }
}

std::string matrix_diagnostics(const Eigen::MatrixXd& m) {
  std::ostringstream msg;
  msg << "dim=" << m.rows() << " max|entry|=" << m.cwiseAbs().maxCoeff()
      << " finite=" << (m.allFinite() ? "yes" : "no");
  return msg.str();
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigendecompose(
    const Eigen::MatrixXd& sym, bool vectors, const char* where) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.compute(sym, vectors ? Eigen::ComputeEigenvectors
                          : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError(std::string(where) + ": eigendecomposition failed (" +
                         matrix_diagnostics(sym) + ")");
  return es;
}

// Orthogonal projector that zeroes the directions every feasible matrix
// annihilates.  For v = u ⊗ 1_k with Σu = 0, the block-sum constraints give
// vᵀXv = (Σu)² = 0, and positive semidefiniteness then forces Xv = 0, so
// the whole feasible set shares this (n−1)-dimensional null space.  The
// returned Π projects onto its orthogonal complement.
Eigen::MatrixXd shared_kernel_complement(const LabelIndexing& ix) {
  const int n = ix.n;
  const int k = ix.k;
  const int d = ix.size();
  Eigen::MatrixXd pi = Eigen::MatrixXd::Identity(d, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double h = ((i == j) ? 1.0 : 0.0) - 1.0 / n;
      pi.block(i * k, j * k, k, k).array() -= h / k;
    }
  return pi;
}

// Projection onto {Y ⪰ 0 : Y annihilates the shared null space}: compress
// onto the complement subspace (an orthogonal projection of symmetric
// matrices), then clamp the spectrum, which stays inside the subspace.
// Working with this smaller cone instead of the full PSD cone matters for
// convergence: the full cone touches the block-constraint set tangentially
// along the shared null directions, and alternating projections creep
// sublinearly through such a wedge; relative to the compressed cone the two
// sets overlap with room to spare, restoring a linear rate.
Eigen::MatrixXd project_reduced_cone(const Eigen::MatrixXd& sym,
                                     const Eigen::MatrixXd& pi,
                                     const char* where) {
  const Eigen::MatrixXd compressed = pi * sym * pi;
  const auto es = eigendecompose(compressed, true, where);
  Eigen::VectorXd clamped = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * clamped.asDiagonal() *
         es.eigenvectors().transpose();
}

// Frobenius distance to that reduced cone (an upper bound on the distance
// to the PSD cone alone): subspace deviation plus negative spectrum.
double reduced_cone_distance(const Eigen::MatrixXd& x,
                             const Eigen::MatrixXd& pi, const char* where) {
  const Eigen::MatrixXd sym = 0.5 * (x + x.transpose());
  const Eigen::MatrixXd compressed = pi * sym * pi;
  double sq = (sym - compressed).squaredNorm();
  const auto es = eigendecompose(compressed, false, where);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()[i];
    if (lam < 0.0) sq += lam * lam;
  }
  return std::sqrt(sq);
}

}  // namespace

PseudoDistribution PseudoDistribution::from_labeling(
    const std::vector<int>& labels, int k) {
  const int n = static_cast<int>(labels.size());
  const LabelIndexing ix = make_indexing(n, k);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(ix.size());
  for (int i = 0; i < n; ++i) {
    if (labels[i] < 0 || labels[i] >= k)
      throw std::invalid_argument("from_labeling: label " +
                                  std::to_string(labels[i]) + " for item " +
                                  std::to_string(i) + " outside [0, " +
                                  std::to_string(k) + ")");
    v(ix.row(i, labels[i])) = 1.0;
  }
  return PseudoDistribution{ix, v * v.transpose()};
}

PseudoDistribution PseudoDistribution::uniform(int n, int k) {
  const LabelIndexing ix = make_indexing(n, k);
  if (k < 2) throw std::invalid_argument("uniform: k must be >= 2");
  Eigen::MatrixXd a =
      Eigen::MatrixXd::Constant(ix.size(), ix.size(), 1.0 / (k * k));
  for (int i = 0; i < n; ++i) {
    a.block(i * k, i * k, k, k).setZero();
    a.block(i * k, i * k, k, k).diagonal().setConstant(1.0 / k);
  }
  return PseudoDistribution{ix, std::move(a)};
}

bool FeasibilityReport::feasible_at(double tol) const {
  return symmetry_violation <= tol && min_eigenvalue >= -tol &&
         min_block_entry >= -tol && max_block_sum_deviation <= tol &&
         max_diag_off_diagonal <= tol;
}

FeasibilityReport check_feasibility(const Eigen::MatrixXd& m,
                                    const LabelIndexing& indexing,
                                    double tol) {
  require_square(m, indexing, "check_feasibility");
  if (tol < 0) throw std::invalid_argument("check_feasibility: tol < 0");
  const int n = indexing.n;
  const int k = indexing.k;

  FeasibilityReport rep;
  rep.symmetry_violation = (m - m.transpose()).cwiseAbs().maxCoeff();
  rep.min_block_entry = m.minCoeff();

  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  const auto es = eigendecompose(sym, false, "check_feasibility");
  double min_eig = es.eigenvalues().minCoeff();
  // Computed eigenvalues of a symmetric matrix carry a backward error of
  // order eps * ||A||; magnitudes below that floor are indistinguishable
  // from zero, so exact vertices report a clean 0 here.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, sym.cwiseAbs().maxCoeff() * sym.rows());
  if (min_eig < 0.0 && min_eig >= -floor) min_eig = 0.0;
  rep.min_eigenvalue = min_eig;

  double worst_sum = 0.0;
  double worst_diag = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double sum = m.block(i * k, j * k, k, k).sum();
      worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    }
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        if (a != b)
          worst_diag =
              std::max(worst_diag, std::abs(m(i * k + a, i * k + b)));
  }
  rep.max_block_sum_deviation = worst_sum;
  rep.max_diag_off_diagonal = worst_diag;
  rep.pass = rep.feasible_at(tol);
  return rep;
}

Eigen::MatrixXd extract_block(const Eigen::MatrixXd& m,
                              const LabelIndexing& indexing, int i, int j) {
  require_square(m, indexing, "extract_block");
  const int n = indexing.n;
  const int k = indexing.k;
  if (i < 0 || i >= n || j < 0 || j >= n)
    throw std::out_of_range("extract_block: pair (" + std::to_string(i) +
                            ", " + std::to_string(j) + ") outside [0, " +
                            std::to_string(n) + ")^2");
  Eigen::MatrixXd b =
      0.5 * (m.block(i * k, j * k, k, k) +
             m.block(j * k, i * k, k, k).transpose());
  b = b.cwiseMax(0.0);
  const double sum = b.sum();
  if (sum <= 0.0) return Eigen::MatrixXd::Constant(k, k, 1.0 / (k * k));
  b /= sum;
  // Absorb the remaining rounding residual into the largest entry so the
  // result sums to 1 at full precision.
  int ra = 0, rb = 0;
  b.maxCoeff(&ra, &rb);
  b(ra, rb) += 1.0 - b.sum();
  return b;
}

Eigen::MatrixXd extract_block(const PseudoDistribution& a, int i, int j) {
  return extract_block(a.entries, a.indexing, i, j);
}

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("project_psd: matrix not square");
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  const auto es = eigendecompose(sym, true, "project_psd");
  const Eigen::VectorXd clamped = es.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXd p = es.eigenvectors() * clamped.asDiagonal() *
                      es.eigenvectors().transpose();
  return 0.5 * (p + p.transpose());
}

Eigen::VectorXd project_simplex(const Eigen::VectorXd& y, double total) {
  if (y.size() == 0)
    throw std::invalid_argument("project_simplex: empty vector");
  if (total <= 0.0)
    throw std::invalid_argument("project_simplex: total must be positive");
  std::vector<double> u(y.data(), y.data() + y.size());
  std::sort(u.begin(), u.end(), std::greater<double>());
  // Largest prefix whose water level stays below its smallest member.
  double cum = 0.0;
  double tau = (u[0] - total);  // overwritten at m = 0
  for (int m = 0; m < static_cast<int>(u.size()); ++m) {
    cum += u[m];
    const double level = (cum - total) / (m + 1);
    if (u[m] - level > 0.0) tau = level;
  }
  return (y.array() - tau).cwiseMax(0.0);
}

Eigen::MatrixXd project_blocks(const Eigen::MatrixXd& m,
                               const LabelIndexing& indexing) {
  require_square(m, indexing, "project_blocks");
  const int n = indexing.n;
  const int k = indexing.k;
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (int i = 0; i < n; ++i) {
    // Diagonal block: off-diagonal entries are constrained to 0, so the
    // projection keeps only the diagonal, pushed onto the simplex.
    Eigen::VectorXd diag = m.block(i * k, i * k, k, k).diagonal();
    out.block(i * k, i * k, k, k).setZero();
    out.block(i * k, i * k, k, k).diagonal() = project_simplex(diag, 1.0);
    for (int j = i + 1; j < n; ++j) {
      Eigen::MatrixXd mid =
          0.5 * (m.block(i * k, j * k, k, k) +
                 m.block(j * k, i * k, k, k).transpose());
      Eigen::Map<Eigen::VectorXd> flat(mid.data(), k * k);
      flat = project_simplex(flat, 1.0);
      out.block(i * k, j * k, k, k) = mid;
      out.block(j * k, i * k, k, k) = mid.transpose();
    }
  }
  return out;
}

DykstraResult dykstra_project(const Eigen::MatrixXd& m,
                              const LabelIndexing& indexing,
                              const DykstraOptions& options) {
  require_square(m, indexing, "dykstra_project");
  if (!m.allFinite())
    throw std::invalid_argument("dykstra_project: non-finite input");
  if (options.tol <= 0 || options.max_iters < 1)
    throw std::invalid_argument("dykstra_project: bad options");

  Eigen::MatrixXd x = 0.5 * (m + m.transpose());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(x.rows(), x.cols());
  Eigen::MatrixXd q = p;
  Eigen::MatrixXd y, prev;
  const Eigen::MatrixXd pi = shared_kernel_complement(indexing);

  DykstraResult res;
  // Snapshots from 50 iterations back, for stagnation detection.
  double bench_movement = 0.0;
  double bench_gap = 0.0;
  for (int it = 1; it <= options.max_iters; ++it) {
    y = project_reduced_cone(x + p, pi, "dykstra_project");
    p += x - y;
    prev = x;
    x = project_blocks(y + q, indexing);
    q += y - x;
    // x satisfies the block constraints exactly.  The gap to the cone
    // iterate is an upper bound on how far x sits outside the cone (y is in
    // it, so dist(x, cone) ≤ ‖x−y‖); the movement between successive
    // iterates is the stopping criterion.  The two can separate while the
    // correction terms are still settling, so the reported residual is the
    // returned matrix's own distance to the cone, which the in-flight gap
    // can badly overstate.
    const double movement = (x - prev).norm();
    const double gap = (x - y).norm();
    res.iterations = it;
    const bool settled =
        movement <= options.tol &&
        (options.gap_tol <= 0.0 || gap <= options.gap_tol);
    if (settled || gap <= options.tol) {
      res.residual = reduced_cone_distance(x, pi, "dykstra_project");
      res.matrix = std::move(x);
      res.converged = true;
      return res;
    }
    if (it % 25 == 0) {
      if (it >= 50 && options.quality_floor > 0.0) {
        // A caller with a quality floor wants a usable output fast or not at
        // all, so two shortcuts apply.  When the two sets meet at a
        // vanishing angle the iteration creeps: movement and gap both decay
        // by well under a quarter per 25 iterations, and no budget reaches
        // tolerance.  Spending the rest of the cap changes nothing but the
        // runtime, so report the failure now.
        if (movement >= 0.75 * bench_movement && gap >= 0.75 * bench_gap)
          break;
        // The gap has frozen above the caller's quality requirement: even a
        // movement-settled output would be rejected, so stop paying for it.
        if (gap > options.quality_floor && gap >= 0.9 * bench_gap) break;
      }
      bench_movement = movement;
      bench_gap = gap;
    }
  }
  res.residual = reduced_cone_distance(x, pi, "dykstra_project");
  res.matrix = std::move(x);
  res.converged = false;
  return res;
}

PseudoDistribution project_feasible(const Eigen::MatrixXd& m,
                                    const LabelIndexing& indexing, double tol,
                                    int max_iters) {
  DykstraOptions options;
  options.tol = tol;
  options.max_iters = max_iters;
  options.gap_tol = tol;
  DykstraResult res = dykstra_project(m, indexing, options);
  if (!res.converged) {
    std::ostringstream msg;
    msg << "project_feasible: no convergence after " << res.iterations
        << " iterations (residual " << res.residual << ", tol " << tol << ")";
    throw ConvergenceError(msg.str(), std::move(res.matrix), res.residual);
  }
  return PseudoDistribution{indexing, std::move(res.matrix)};
}

}  // namespace locpred
