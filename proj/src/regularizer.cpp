#include "locpred/regularizer.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "locpred/errors.hpp"

namespace locpred {

namespace {

constexpr double kLn2 = 0.69314718055994530941723212145818;

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> decompose(
    const Eigen::MatrixXd& a, bool vectors, const char* where) {
  if (a.rows() != a.cols())
    throw std::invalid_argument(std::string(where) + ": matrix not square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.compute(0.5 * (a + a.transpose()),
             vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError(std::string(where) + ": eigendecomposition failed");
  return es;
}

void require_pd(double shifted, const char* where) {
  if (shifted <= 0.0) {
    std::ostringstream msg;
    msg << where << ": kA + I not positive definite (eigenvalue " << shifted
        << ")";
    throw std::domain_error(msg.str());
  }
}

}  // namespace

double logdet_reg(const Eigen::MatrixXd& a, int k) {
  if (k < 1) throw std::invalid_argument("logdet_reg: k must be >= 1");
  const auto es = decompose(a, false, "logdet_reg");
  double bits = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double shifted = k * es.eigenvalues()(i) + 1.0;
    require_pd(shifted, "logdet_reg");
    bits += std::log2(shifted);
  }
  return bits;
}

double logdet_reg(const PseudoDistribution& a) {
  return logdet_reg(a.entries, a.indexing.k);
}

Eigen::MatrixXd logdet_reg_gradient(const Eigen::MatrixXd& a, int k) {
  if (k < 1)
    throw std::invalid_argument("logdet_reg_gradient: k must be >= 1");
  const auto es = decompose(a, true, "logdet_reg_gradient");
  Eigen::VectorXd w(es.eigenvalues().size());
  for (int i = 0; i < w.size(); ++i) {
    const double shifted = k * es.eigenvalues()(i) + 1.0;
    require_pd(shifted, "logdet_reg_gradient");
    w(i) = k / (kLn2 * shifted);
  }
  Eigen::MatrixXd g =
      es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (g + g.transpose());
}

Eigen::MatrixXd logdet_reg_gradient(const PseudoDistribution& a) {
  return logdet_reg_gradient(a.entries, a.indexing.k);
}

double concavity_modulus_check(const PseudoDistribution& a,
                               const PseudoDistribution& b,
                               const RoundQuery& query,
                               const PayoffMatrix& payoff, double eps,
                               double c) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("concavity_modulus_check: eps outside (0, 1)");
  if (a.indexing != b.indexing)
    throw std::invalid_argument(
        "concavity_modulus_check: mismatched shapes");
  const int k = a.indexing.k;
  if (payoff.rows() != k || payoff.cols() != k)
    throw std::invalid_argument(
        "concavity_modulus_check: payoff must be k x k");
  // Validation slack: inputs produced by the iterative projection are
  // feasible to ~10x its tolerance.
  const double slack = 10.0 * kFeasibilityTol;
  if (!check_feasibility(a.entries, a.indexing, slack).pass ||
      !check_feasibility(b.entries, b.indexing, slack).pass)
    throw std::invalid_argument("concavity_modulus_check: infeasible input");

  // Identical points: the mixture is the point itself and the payoff
  // distance vanishes, so the margin is exactly zero.
  if ((a.entries - b.entries).cwiseAbs().maxCoeff() == 0.0) return 0.0;

  const double pa = payoff_value(extract_block(a, query.i, query.j), payoff);
  const double pb = payoff_value(extract_block(b, query.i, query.j), payoff);
  const double delta = std::abs(pa - pb);

  const Eigen::MatrixXd mix = eps * a.entries + (1.0 - eps) * b.entries;
  const double r_mix = logdet_reg(mix, k);
  const double r_a = logdet_reg(a);
  const double r_b = logdet_reg(b);
  return r_mix - eps * r_a - (1.0 - eps) * r_b -
         c * eps * (1.0 - eps) * delta * delta / (static_cast<double>(k) * k);
}

}  // namespace locpred
