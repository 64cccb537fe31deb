#include "ner/linreg.hpp"

#include "ner/log.hpp"
#include "ner/numerics.hpp"
#include "ner/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ner {

void RegressionConfig::validate() const {
  if (!(c_prime > 0)) throw std::invalid_argument("c_prime must be positive");
  if (k_max < 1) throw std::invalid_argument("k_max must be at least 1");
  if (!(prune_fraction >= 0 && prune_fraction < 1))
    throw std::invalid_argument("prune_fraction must lie in [0, 1)");
  if (cv_folds < 1) throw std::invalid_argument("cv_folds must be positive");
}

NormalizedResponse normalize_response(const Dataset& data) {
  const Eigen::VectorXd& y = data.responses();
  if (y.size() < 2) throw std::invalid_argument("normalize_response: needs at least 2 samples");
  const double sd = std::sqrt((y.array() - y.mean()).square().sum() / double(y.size() - 1));
  if (!(sd > 0)) throw std::invalid_argument("normalize_response: responses are constant");
  return {data.with_responses(y / sd), sd};
}

double residual_variance(const Eigen::VectorXd& residual) {
  if (residual.size() < 2) throw std::invalid_argument("residual_variance: needs n >= 2");
  return (residual.array() - residual.mean()).square().sum() / double(residual.size() - 1);
}

NoiseEstimate noise_variance(const Dataset& data, const IndexSet& candidate) {
  return {residual_variance(erm(data, candidate).residual)};
}

double regression_threshold(std::size_t k, std::size_t n, double sigma2_hat, double c_prime) {
  if (k < 1 || n < 1) throw std::invalid_argument("regression_threshold: k and n must be positive");
  if (!(sigma2_hat >= 0)) throw std::invalid_argument("regression_threshold: negative variance");
  if (!(c_prime > 0)) throw std::invalid_argument("regression_threshold: c' must be positive");
  const double scaled = double(k) * sigma2_hat / double(n);
  const double quantile = double(chi2_1_inv_cdf(clamp_probability(1.0 - scaled)));
  return c_prime * scaled * quantile;
}

ThresholdRule regression_rule(double c_prime) {
  if (!(c_prime > 0)) throw std::invalid_argument("c' must be positive");
  return {[](const Eigen::VectorXd& r) { return residual_variance(r); },
          [c_prime](std::size_t k, std::size_t n, double s2) {
            return regression_threshold(k, n, s2, c_prime);
          }};
}

ThresholdRule known_noise_rule(double sigma2, double c, double delta) {
  if (!(sigma2 >= 0) || !(c > 0) || !(delta > 0 && delta <= 1))
    throw std::invalid_argument("known_noise_rule: need sigma2 >= 0, c > 0, delta in (0, 1]");
  const double quantile = double(chi2_1_inv_cdf(clamp_probability(1.0 - delta)));
  return {[sigma2](const Eigen::VectorXd&) { return sigma2; },
          [c, quantile](std::size_t, std::size_t n, double s2) {
            return c * s2 / double(n) * quantile;
          }};
}

ThresholdRule consistent_known_noise_rule(double sigma2, double c, double c1) {
  if (!(sigma2 >= 0) || !(c > 0) || !(c1 > 0))
    throw std::invalid_argument("consistent_known_noise_rule: need sigma2 >= 0, c > 0, c1 > 0");
  return {[sigma2](const Eigen::VectorXd&) { return sigma2; },
          [c, c1](std::size_t, std::size_t n, double s2) {
            const double q = double(chi2_1_inv_cdf(clamp_probability(1.0 - c1 * s2 / double(n))));
            return c * s2 / double(n) * q;
          }};
}

IndexSet prune_support(const IndexSet& support, const Eigen::VectorXd& coefficients,
                       double fraction) {
  if (static_cast<std::size_t>(coefficients.size()) != support.size())
    throw std::invalid_argument("prune_support: coefficient count does not match support");
  if (support.empty()) return {};
  const double cutoff = fraction * coefficients.cwiseAbs().maxCoeff();
  IndexSet kept;
  for (std::size_t i = 0; i < support.size(); ++i)
    if (std::abs(coefficients(static_cast<Eigen::Index>(i))) >= cutoff) kept.insert(support[i]);
  return kept;
}

RegressionResult sner_regression(const Dataset& data, const RegressionConfig& config) {
  config.validate();
  RegressionResult out;
  out.c_prime = config.c_prime;
  out.seed = config.seed;

  Dataset working = data;
  if (config.normalize) {
    NormalizedResponse norm = normalize_response(data);
    working = std::move(norm.data);
    out.sigma_y = norm.sigma_y;
  }

  std::vector<std::size_t> pool(data.feature_count());
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  const std::size_t k_max = std::min(config.k_max, pool.size());
  out.selection = sner(working, pool, regression_rule(config.c_prime), k_max);

  out.support = prune_support(out.selection.selected, out.selection.coefficients,
                              config.prune_fraction);
  if (!out.support.empty()) out.coefficients = erm(data, out.support).coefficients;
  return out;
}

std::vector<double> default_cprime_grid() {
  std::vector<double> grid;
  for (int e = -3; e <= 3; ++e) grid.push_back(std::ldexp(1.0, e));
  return grid;
}

namespace {

double heldout_mse(const Dataset& test, const RegressionResult& fit) {
  Eigen::VectorXd pred = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(test.sample_count()));
  if (!fit.support.empty()) pred = test.active_design(fit.support) * fit.coefficients;
  return (test.responses() - pred).squaredNorm() / double(test.sample_count());
}

}  // namespace

CrossValidationResult cross_validate_cprime(const Dataset& data, std::span<const double> grid,
                                            const RegressionConfig& config) {
  if (grid.empty()) throw std::invalid_argument("cross_validate_cprime: empty grid");
  for (double c : grid)
    if (!(c > 0)) throw std::invalid_argument("cross_validate_cprime: grid values must be positive");

  CrossValidationResult out;
  out.grid.assign(grid.begin(), grid.end());
  if (grid.size() == 1) {
    out.best_c_prime = grid.front();
    out.mean_errors.assign(1, std::numeric_limits<double>::quiet_NaN());
    return out;
  }
  if (config.cv_folds < 2) throw std::invalid_argument("cross_validate_cprime: needs cv_folds >= 2");
  const std::size_t n = data.sample_count();
  if (n < config.cv_folds)
    throw std::invalid_argument("cross_validate_cprime: " + std::to_string(n) +
                                " samples for " + std::to_string(config.cv_folds) + " folds");

  CounterRng rng = CounterRng::stream(config.seed, 0);
  const std::vector<std::size_t> perm = random_permutation(rng, n);

  std::vector<double> sums(grid.size(), 0.0);
  std::size_t used = 0;
  for (std::size_t f = 0; f < config.cv_folds; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < n; ++i) (i % config.cv_folds == f ? test : train).push_back(perm[i]);
    const Dataset train_data = data.subset_samples(train);
    const Dataset test_data = data.subset_samples(test);

    const Eigen::VectorXd& ty = train_data.responses();
    if (ty.size() < 2 || (ty.array() == ty(0)).all()) {
      log::warn("cross_validate_cprime: fold " + std::to_string(f + 1) +
                " has constant training responses, skipped");
      ++out.skipped_folds;
      continue;
    }
    for (std::size_t g = 0; g < grid.size(); ++g) {
      RegressionConfig cfg = config;
      cfg.c_prime = grid[g];
      sums[g] += heldout_mse(test_data, sner_regression(train_data, cfg));
    }
    ++used;
  }
  if (used == 0) throw std::invalid_argument("cross_validate_cprime: every fold was degenerate");

  out.mean_errors.resize(grid.size());
  std::size_t best = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    out.mean_errors[g] = sums[g] / double(used);
    if (out.mean_errors[g] < out.mean_errors[best] ||
        (out.mean_errors[g] == out.mean_errors[best] && grid[g] < grid[best]))
      best = g;
  }
  out.best_c_prime = grid[best];
  return out;
}

RegressionResult sner_regression_cv(const Dataset& data, std::span<const double> grid,
                                    const RegressionConfig& config) {
  RegressionConfig cfg = config;
  cfg.c_prime = cross_validate_cprime(data, grid, config).best_c_prime;
  return sner_regression(data, cfg);
}

}  // namespace ner
