#pragma once

#include <Eigen/Core>

#include "locpred/constants.hpp"
#include "locpred/environments.hpp"
#include "locpred/pseudodist.hpp"

namespace locpred {

// R(A) = log2 det(kA + I), measured in bits.  On the feasible set
// 0 <= R(A) <= nk, with 0 attained exactly at labeling points.
double logdet_reg(const Eigen::MatrixXd& a, int k);
double logdet_reg(const PseudoDistribution& a);

// Gradient (k / ln 2) (kA + I)^{-1}.
Eigen::MatrixXd logdet_reg_gradient(const Eigen::MatrixXd& a, int k);
Eigen::MatrixXd logdet_reg_gradient(const PseudoDistribution& a);

// Concavity margin of R along the (eps, 1-eps) mixture of a and b,
// measured against c * eps(1-eps) / k^2 times the squared payoff distance
// |payoff_value(a) - payoff_value(b)|^2 at the given query.  Nonnegative
// when R is strongly concave with respect to payoff distance at modulus c.
double concavity_modulus_check(const PseudoDistribution& a,
                               const PseudoDistribution& b,
                               const RoundQuery& query,
                               const PayoffMatrix& payoff, double eps,
                               double c = kPayoffConcavityCoeff);

}  // namespace locpred
