#pragma once

#include "ner/dataset.hpp"
#include "ner/model.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ner {

// Threshold gamma_k for the expansion test at step k. The noise estimate is
// derived from the residual of the candidate assigned at that step, so
// regression rules can re-estimate the variance as the model grows.
struct ThresholdRule {
  std::function<double(const Eigen::VectorXd& assigned_residual)> noise_estimate;
  std::function<double(std::size_t step, std::size_t sample_count, double noise)> threshold;

  static ThresholdRule constant(double gamma);
};

struct SelectionResult {
  std::size_t k_hat = 0;
  IndexSet selected;
  Eigen::VectorXd coefficients;
  // Accepted models, starting with the empty model M0.
  NestedChain chain;
  // One entry per tested expansion, including a final rejected one.
  std::vector<IndexSet> assigned;
  std::vector<double> seers;
  std::vector<double> thresholds;
  std::vector<double> noise_estimates;
  std::vector<bool> tests;
  std::size_t group_size = 1;

  std::size_t iterations() const { return tests.size(); }
};

// 1{delta_r >= gamma}; the boundary counts as a pass.
bool ner_test(double delta_r, double gamma);

// Estimated order max{k : T_k = 1}. seers[i] and thresholds[i] belong to
// k = i + 2; T_1 is always 1, so the result is at least 1.
std::size_t ner_select(std::span<const double> seers, std::span<const double> thresholds);

// Greedy sorted-nested selection. At each step every remaining candidate
// (a single pool index, or a consecutive block of group_size pool entries) is
// appended to the last accepted set, the candidate with the smallest ERM risk
// is tested against the rule, and the first rejection stops the run. The
// result is the last accepted model; k_hat may be 0.
SelectionResult sner(const Dataset& data, std::span<const std::size_t> pool,
                     const ThresholdRule& rule, std::size_t k_max, std::size_t group_size = 1);

}  // namespace ner
