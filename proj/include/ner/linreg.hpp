#pragma once

#include "ner/dataset.hpp"
#include "ner/selection.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ner {

struct RegressionConfig {
  double c_prime = 1.0;
  std::size_t k_max = 20;
  // Selected coefficients smaller than prune_fraction * max |coefficient| are dropped.
  double prune_fraction = 0.1;
  std::size_t cv_folds = 5;
  bool normalize = true;
  // Drives the fold assignment of cross_validate_cprime.
  std::uint64_t seed = 0;

  void validate() const;
};

struct NoiseEstimate {
  double sigma2_hat = 0.0;
};

struct NormalizedResponse {
  Dataset data;
  double sigma_y = 1.0;
};

// Divides the responses by their sample standard deviation (n - 1
// denominator). Throws std::invalid_argument for constant responses or n < 2.
NormalizedResponse normalize_response(const Dataset& data);

// ||r - mean(r)||^2 / (n - 1).
double residual_variance(const Eigen::VectorXd& residual);

// Noise variance from the residual of the least-squares fit on candidate.
NoiseEstimate noise_variance(const Dataset& data, const IndexSet& candidate);

// gamma = c' k (s2 / n) F1^-1(1 - k s2 / n), quantile argument clamped into
// [1e-15, 1 - 1e-15].
double regression_threshold(std::size_t k, std::size_t n, double sigma2_hat, double c_prime);

// Rule used by the regression pipeline: noise re-estimated from each step's
// assigned candidate, threshold from regression_threshold.
ThresholdRule regression_rule(double c_prime);

// Known-variance rules for verification runs.
// gamma = c (sigma2 / n) F1^-1(1 - delta).
ThresholdRule known_noise_rule(double sigma2, double c, double delta);
// gamma = c (sigma2 / n) F1^-1(1 - c1 sigma2 / n).
ThresholdRule consistent_known_noise_rule(double sigma2, double c, double c1);

struct RegressionResult {
  // Raw engine output on the (normalized) responses.
  SelectionResult selection;
  // Selection after pruning, with least-squares coefficients refit on the
  // original responses.
  IndexSet support;
  Eigen::VectorXd coefficients;
  double c_prime = 1.0;
  double sigma_y = 1.0;
  std::uint64_t seed = 0;
};

// Indices of support whose |coefficient| >= fraction * max |coefficient|.
IndexSet prune_support(const IndexSet& support, const Eigen::VectorXd& coefficients,
                       double fraction);

// Normalize, run S-NER over every feature with regression_rule, prune.
RegressionResult sner_regression(const Dataset& data, const RegressionConfig& config);

struct CrossValidationResult {
  double best_c_prime = 1.0;
  std::vector<double> grid;
  std::vector<double> mean_errors;
  std::size_t skipped_folds = 0;
};

// {2^-3, 2^-2, ..., 2^3}.
std::vector<double> default_cprime_grid();

// K-fold cross-validation of c'. Each grid value is scored by the mean
// held-out squared error of the refit selection; ties go to the smaller c'.
// Folds whose training responses are constant are skipped with a warning.
CrossValidationResult cross_validate_cprime(const Dataset& data, std::span<const double> grid,
                                            const RegressionConfig& config);

// Cross-validates c' over grid, then runs sner_regression with the winner.
RegressionResult sner_regression_cv(const Dataset& data, std::span<const double> grid,
                                    const RegressionConfig& config);

}  // namespace ner
