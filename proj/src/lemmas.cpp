#include "locpred/lemmas.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "locpred/errors.hpp"

namespace locpred {

namespace {

constexpr double kLnTwoPi = 1.8378770664093454835606594728112;

void validate_distribution(const std::vector<double>& p, const char* where) {
  if (p.empty())
    throw std::invalid_argument(std::string(where) + ": empty distribution");
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= -1e-12) || !std::isfinite(x))
      throw std::invalid_argument(std::string(where) +
                                  ": negative or non-finite probability");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument(std::string(where) +
                                ": probabilities sum to " +
                                std::to_string(sum) + ", not 1");
}

// Natural-log entropy, tolerant of zero entries.
double entropy_nat(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log(x);
  return h;
}

void require_covariance_pair(const Eigen::MatrixXd& s1,
                             const Eigen::MatrixXd& s2, int i, int j,
                             const char* where) {
  if (s1.rows() != s1.cols() || s2.rows() != s2.cols() ||
      s1.rows() != s2.rows())
    throw std::invalid_argument(std::string(where) +
                                ": need square matrices of equal dimension");
  const int d = static_cast<int>(s1.rows());
  if (i < 0 || i >= d || j < 0 || j >= d)
    throw std::out_of_range(std::string(where) + ": index outside [0, dim)");
  const double asym = std::max(
      (s1 - s1.transpose()).cwiseAbs().maxCoeff(),
      (s2 - s2.transpose()).cwiseAbs().maxCoeff());
  if (asym > 1e-9)
    throw std::invalid_argument(std::string(where) + ": matrix not symmetric");
}

void require_dim_1_or_2(const Eigen::MatrixXd& sigma, const char* where) {
  if (sigma.rows() != sigma.cols())
    throw std::invalid_argument(std::string(where) + ": matrix not square");
  if (sigma.rows() != 1 && sigma.rows() != 2)
    throw std::invalid_argument(std::string(where) +
                                ": quadrature supports dimensions 1 and 2");
}

struct GaussianDensity {
  // Precomputed N(mu, sigma) evaluator; throws on non-PD or
  // quadrature-hostile conditioning.
  GaussianDensity(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                  const char* where)
      : mu_(mu) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
    if (es.info() != Eigen::Success)
      throw NumericalError(std::string(where) + ": eigendecomposition failed");
    const double lam_min = es.eigenvalues().minCoeff();
    const double lam_max = es.eigenvalues().maxCoeff();
    if (lam_min <= 0.0)
      throw std::domain_error(std::string(where) +
                              ": covariance not positive definite");
    if (lam_min < 1e-6 * lam_max)
      throw std::domain_error(std::string(where) +
                              ": covariance too ill-conditioned for quadrature");
    inv_ = es.eigenvectors() *
           es.eigenvalues().cwiseInverse().asDiagonal() *
           es.eigenvectors().transpose();
    const int d = static_cast<int>(sigma.rows());
    log_norm_ = -0.5 * (d * kLnTwoPi + es.eigenvalues().array().log().sum());
    sigma_max_ = std::sqrt(lam_max);
  }

  double operator()(double x) const {
    const double z = x - mu_(0);
    return std::exp(log_norm_ - 0.5 * inv_(0, 0) * z * z);
  }

  double operator()(double x, double y) const {
    const double zx = x - mu_(0);
    const double zy = y - mu_(1);
    const double q =
        inv_(0, 0) * zx * zx + 2.0 * inv_(0, 1) * zx * zy + inv_(1, 1) * zy * zy;
    return std::exp(log_norm_ - 0.5 * q);
  }

  Eigen::VectorXd mu_;
  Eigen::MatrixXd inv_;
  double log_norm_ = 0.0;
  double sigma_max_ = 0.0;
};

// Midpoint rule over [-L, L]^d around `center`, d in {1, 2}.
template <typename F>
double grid_integrate(int d, double center_x, double center_y, double half_width,
                      int points, F&& integrand) {
  const double h = 2.0 * half_width / points;
  double total = 0.0;
  if (d == 1) {
    for (int m = 0; m < points; ++m) {
      const double x = center_x - half_width + (m + 0.5) * h;
      total += integrand(x, 0.0);
    }
    return total * h;
  }
  for (int mx = 0; mx < points; ++mx) {
    const double x = center_x - half_width + (mx + 0.5) * h;
    double row = 0.0;
    for (int my = 0; my < points; ++my) {
      const double y = center_y - half_width + (my + 0.5) * h;
      row += integrand(x, y);
    }
    total += row;
  }
  return total * h * h;
}

}  // namespace

double discrete_entropy(const std::vector<double>& p) {
  validate_distribution(p, "discrete_entropy");
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log2(x);
  return h;
}

double entropy_concavity_gap(const std::vector<double>& p,
                             const std::vector<double>& q, double eps,
                             double c) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("entropy_concavity_gap: eps outside (0, 1)");
  validate_distribution(p, "entropy_concavity_gap");
  validate_distribution(q, "entropy_concavity_gap");
  // Union support: the shorter vector is zero-padded.
  const size_t m = std::max(p.size(), q.size());
  std::vector<double> pp(m, 0.0), qq(m, 0.0);
  std::copy(p.begin(), p.end(), pp.begin());
  std::copy(q.begin(), q.end(), qq.begin());
  if (pp == qq) return 0.0;  // identical: mixture is the point itself

  double delta = 0.0;
  std::vector<double> mix(m);
  for (size_t i = 0; i < m; ++i) {
    delta += std::abs(pp[i] - qq[i]);
    mix[i] = eps * pp[i] + (1.0 - eps) * qq[i];
  }
  return entropy_nat(mix) - eps * entropy_nat(pp) -
         (1.0 - eps) * entropy_nat(qq) - c * eps * (1.0 - eps) * delta * delta;
}

double logdet_pd(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols())
    throw std::invalid_argument("logdet_pd: matrix not square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (sigma + sigma.transpose()), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("logdet_pd: eigendecomposition failed");
  double sum = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam <= 0.0)
      throw std::domain_error("logdet_pd: matrix not positive definite");
    sum += std::log(lam);
  }
  return sum;
}

double gaussian_tv_lower_bound(const Eigen::MatrixXd& sigma1,
                               const Eigen::MatrixXd& sigma2, int i, int j) {
  require_covariance_pair(sigma1, sigma2, i, j, "gaussian_tv_lower_bound");
  const int d = static_cast<int>(sigma1.rows());
  Eigen::VectorXd ei = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd ej = Eigen::VectorXd::Zero(d);
  ei(i) = 1.0;
  ej(j) = 1.0;
  const Eigen::VectorXd dirs[3] = {ei, ej, ei + ej};

  // |E e^{iuX} - E e^{iuY}| <= 2 TV(X, Y); with u = v scaled by the
  // combined variance, each direction v gives gap/2 as a lower bound.
  double best = -1.0;
  for (const Eigen::VectorXd& v : dirs) {
    const double a1 = v.dot(sigma1 * v);
    const double a2 = v.dot(sigma2 * v);
    const double denom = a1 + a2;
    if (denom <= 0.0) continue;  // degenerate direction carries no signal
    const double gap = std::abs(std::exp(-0.5 * a1 / denom) -
                                std::exp(-0.5 * a2 / denom));
    best = std::max(best, gap);
  }
  if (best < 0.0)
    throw std::domain_error(
        "gaussian_tv_lower_bound: all probe directions degenerate");
  return 0.5 * best;
}

double logdet_concavity_gap(const Eigen::MatrixXd& sigma1,
                            const Eigen::MatrixXd& sigma2, int i, int j,
                            double eps, double c) {
  require_covariance_pair(sigma1, sigma2, i, j, "logdet_concavity_gap");
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("logdet_concavity_gap: eps outside (0, 1)");
  const double s =
      sigma1(i, i) + sigma1(j, j) + sigma2(i, i) + sigma2(j, j);
  if (s <= 0.0)
    throw std::domain_error("logdet_concavity_gap: degenerate diagonal");
  if ((sigma1 - sigma2).cwiseAbs().maxCoeff() == 0.0) {
    logdet_pd(sigma1);  // still reject non-PD input
    return 0.0;
  }
  const double delta = std::abs(sigma1(i, j) - sigma2(i, j)) / s;
  const Eigen::MatrixXd mix = (1.0 - eps) * sigma1 + eps * sigma2;
  return logdet_pd(mix) - (1.0 - eps) * logdet_pd(sigma1) -
         eps * logdet_pd(sigma2) - c * eps * (1.0 - eps) * delta * delta;
}

double gaussian_tv_grid(const Eigen::MatrixXd& sigma1,
                        const Eigen::MatrixXd& sigma2,
                        const QuadratureOptions& options) {
  require_dim_1_or_2(sigma1, "gaussian_tv_grid");
  require_dim_1_or_2(sigma2, "gaussian_tv_grid");
  if (sigma1.rows() != sigma2.rows())
    throw std::invalid_argument("gaussian_tv_grid: dimension mismatch");
  const int d = static_cast<int>(sigma1.rows());
  const Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
  const GaussianDensity p1(mu, sigma1, "gaussian_tv_grid");
  const GaussianDensity p2(mu, sigma2, "gaussian_tv_grid");
  const double half_width =
      options.half_width_sigmas * std::max(p1.sigma_max_, p2.sigma_max_);
  const int points =
      d == 1 ? 2 * options.points_per_axis + 1 : options.points_per_axis;
  const double integral = grid_integrate(
      d, 0.0, 0.0, half_width, points, [&](double x, double y) {
        return d == 1 ? std::abs(p1(x) - p2(x)) : std::abs(p1(x, y) - p2(x, y));
      });
  return 0.5 * integral;
}

double gaussian_entropy_quadrature(const Eigen::MatrixXd& sigma,
                                   const QuadratureOptions& options) {
  require_dim_1_or_2(sigma, "gaussian_entropy_quadrature");
  const int d = static_cast<int>(sigma.rows());
  const Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
  const GaussianDensity p(mu, sigma, "gaussian_entropy_quadrature");
  const double half_width = options.half_width_sigmas * p.sigma_max_;
  const int points =
      d == 1 ? 2 * options.points_per_axis + 1 : options.points_per_axis;
  return grid_integrate(d, 0.0, 0.0, half_width, points,
                        [&](double x, double y) {
                          const double v = d == 1 ? p(x) : p(x, y);
                          return v > 0.0 ? -v * std::log(v) : 0.0;
                        });
}

double gaussian_entropy_closed_form(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols())
    throw std::invalid_argument("gaussian_entropy_closed_form: not square");
  const double d = static_cast<double>(sigma.rows());
  return 0.5 * logdet_pd(sigma) + 0.5 * d * (kLnTwoPi + 1.0);
}

Eigen::VectorXd GaussianMixture::mean() const {
  return w * mu1 + (1.0 - w) * mu2;
}

Eigen::MatrixXd GaussianMixture::covariance() const {
  const Eigen::VectorXd m = mean();
  const Eigen::VectorXd d1 = mu1 - m;
  const Eigen::VectorXd d2 = mu2 - m;
  return w * (s1 + d1 * d1.transpose()) +
         (1.0 - w) * (s2 + d2 * d2.transpose());
}

double mixture_entropy_quadrature(const GaussianMixture& mix,
                                  const QuadratureOptions& options) {
  if (!(mix.w > 0.0 && mix.w < 1.0))
    throw std::invalid_argument("mixture_entropy_quadrature: w outside (0, 1)");
  require_dim_1_or_2(mix.s1, "mixture_entropy_quadrature");
  require_dim_1_or_2(mix.s2, "mixture_entropy_quadrature");
  if (mix.s1.rows() != mix.s2.rows() || mix.mu1.size() != mix.s1.rows() ||
      mix.mu2.size() != mix.s2.rows())
    throw std::invalid_argument("mixture_entropy_quadrature: shape mismatch");
  const int d = static_cast<int>(mix.s1.rows());
  const GaussianDensity p1(mix.mu1, mix.s1, "mixture_entropy_quadrature");
  const GaussianDensity p2(mix.mu2, mix.s2, "mixture_entropy_quadrature");
  const Eigen::VectorXd center = mix.mean();
  const double spread = std::max((mix.mu1 - center).cwiseAbs().maxCoeff(),
                                 (mix.mu2 - center).cwiseAbs().maxCoeff());
  const double half_width =
      options.half_width_sigmas * std::max(p1.sigma_max_, p2.sigma_max_) +
      spread;
  const int points =
      d == 1 ? 2 * options.points_per_axis + 1 : options.points_per_axis;
  const double cy = d == 2 ? center(1) : 0.0;
  return grid_integrate(
      d, center(0), cy, half_width, points, [&](double x, double y) {
        const double v = d == 1
                             ? mix.w * p1(x) + (1.0 - mix.w) * p2(x)
                             : mix.w * p1(x, y) + (1.0 - mix.w) * p2(x, y);
        return v > 0.0 ? -v * std::log(v) : 0.0;
      });
}

}  // namespace locpred
