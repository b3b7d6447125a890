#include "locpred/sampling.hpp"

#include <cmath>

#include "locpred/rng.hpp"

namespace locpred {

Eigen::MatrixXd random_symmetric(int dim, std::mt19937_64& rng, double scale) {
  Eigen::MatrixXd m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m(r, c) = normal01(rng);
  return scale * 0.5 * (m + m.transpose());
}

Eigen::MatrixXd random_psd(int dim, std::mt19937_64& rng, double jitter) {
  Eigen::MatrixXd b(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) b(r, c) = normal01(rng);
  Eigen::MatrixXd m = b * b.transpose() / static_cast<double>(dim);
  if (jitter > 0.0) m += jitter * Eigen::MatrixXd::Identity(dim, dim);
  return m;
}

std::vector<double> random_distribution(int m, std::mt19937_64& rng) {
  std::vector<double> p(m);
  double sum = 0.0;
  for (double& x : p) {
    x = -std::log(1.0 - uniform01(rng));  // Exp(1); Dirichlet(1) after renorm
    sum += x;
  }
  for (double& x : p) x /= sum;
  return p;
}

std::vector<int> random_labeling(int n, int k, std::mt19937_64& rng) {
  std::vector<int> labels(n);
  for (int& l : labels) l = uniform_index(rng, k);
  return labels;
}

PseudoDistribution random_feasible_mixture(const LabelIndexing& indexing,
                                           std::mt19937_64& rng,
                                           int components) {
  const std::vector<double> w = random_distribution(components + 1, rng);
  PseudoDistribution out = PseudoDistribution::uniform(indexing.n, indexing.k);
  out.entries *= w.back();
  for (int c = 0; c < components; ++c)
    out.entries += w[c] * PseudoDistribution::from_labeling(
                              random_labeling(indexing.n, indexing.k, rng),
                              indexing.k)
                             .entries;
  return out;
}

PseudoDistribution random_projected_feasible(const LabelIndexing& indexing,
                                             std::mt19937_64& rng,
                                             double scale) {
  const Eigen::MatrixXd noise = random_symmetric(indexing.size(), rng, scale);
  const Eigen::MatrixXd base =
      PseudoDistribution::uniform(indexing.n, indexing.k).entries;
  // Project well past the default tolerance: samples feed spectral range
  // checks, and a 1e-11 cone gap keeps the worst log-det dip below 1e-9
  // while exact block sums pin the trace the upper range bound needs.
  return project_feasible(base + noise, indexing, 1e-11);
}

}  // namespace locpred
