#pragma once

#include <Eigen/Core>
#include <random>
#include <vector>

#include "locpred/pseudodist.hpp"

namespace locpred {

Eigen::MatrixXd random_symmetric(int dim, std::mt19937_64& rng,
                                 double scale = 1.0);

// B B^T / dim with standard normal B, plus jitter * I.
Eigen::MatrixXd random_psd(int dim, std::mt19937_64& rng,
                           double jitter = 0.0);

// Dirichlet(1,...,1) point on the m-simplex.
std::vector<double> random_distribution(int m, std::mt19937_64& rng);

std::vector<int> random_labeling(int n, int k, std::mt19937_64& rng);

// Random feasible point: Dirichlet-weighted mixture of labeling outer
// products plus a uniform component.  Exactly feasible by convexity.
PseudoDistribution random_feasible_mixture(const LabelIndexing& indexing,
                                           std::mt19937_64& rng,
                                           int components = 6);

// Random feasible point with generic spectrum: Dykstra projection of the
// uniform point plus symmetric gaussian noise.
PseudoDistribution random_projected_feasible(const LabelIndexing& indexing,
                                             std::mt19937_64& rng,
                                             double scale = 0.5);

}  // namespace locpred
