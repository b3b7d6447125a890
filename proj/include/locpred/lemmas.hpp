#pragma once

#include <Eigen/Core>
#include <vector>

#include "locpred/constants.hpp"

namespace locpred {

// Shannon entropy in bits; zero entries contribute zero.
double discrete_entropy(const std::vector<double>& p);

// Concavity gap of the natural-log entropy along the (eps, 1-eps) mixture
// of p and q, minus c * eps(1-eps) * (sum |p_i - q_i|)^2.  Vectors of
// different lengths are zero-padded to a common support.  Nonnegative for
// c <= 1/4; identical inputs give exactly 0.
double entropy_concavity_gap(const std::vector<double>& p,
                             const std::vector<double>& q, double eps,
                             double c = kEntropyConcavityCoeff);

// log det of a symmetric positive definite matrix (natural log).
double logdet_pd(const Eigen::MatrixXd& sigma);

// Lower bound on the total variation distance between centered gaussians
// N(0, sigma1) and N(0, sigma2), from their characteristic functions
// evaluated along e_i, e_j and e_i + e_j.
double gaussian_tv_lower_bound(const Eigen::MatrixXd& sigma1,
                               const Eigen::MatrixXd& sigma2, int i, int j);

// Concavity gap of log det along the (1-eps, eps) mixture, minus
// c * eps(1-eps) * delta^2 where delta = |sigma1(i,j) - sigma2(i,j)|
// normalized by the sum of the four involved diagonal entries.
double logdet_concavity_gap(const Eigen::MatrixXd& sigma1,
                            const Eigen::MatrixXd& sigma2, int i, int j,
                            double eps, double c = kLogdetConcavityCoeff);

// --- quadrature oracles (dimensions 1 and 2 only) ---

struct QuadratureOptions {
  int points_per_axis = 2000;   // 1-D uses 2 * points_per_axis + 1
  double half_width_sigmas = 8.0;
};

// Midpoint-rule total variation distance between centered gaussians.
double gaussian_tv_grid(const Eigen::MatrixXd& sigma1,
                        const Eigen::MatrixXd& sigma2,
                        const QuadratureOptions& options = {});

// Midpoint-rule differential entropy of N(mu, sigma), natural log.
double gaussian_entropy_quadrature(const Eigen::MatrixXd& sigma,
                                   const QuadratureOptions& options = {});

// Closed form: (1/2) log det sigma + (d/2) log(2 pi e).
double gaussian_entropy_closed_form(const Eigen::MatrixXd& sigma);

// Two-component gaussian mixture w * N(mu1, s1) + (1-w) * N(mu2, s2).
struct GaussianMixture {
  double w = 0.5;
  Eigen::VectorXd mu1, mu2;
  Eigen::MatrixXd s1, s2;

  Eigen::VectorXd mean() const;
  Eigen::MatrixXd covariance() const;
};

double mixture_entropy_quadrature(const GaussianMixture& mix,
                                  const QuadratureOptions& options = {});

}  // namespace locpred
