#pragma once

#include "ner/dataset.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace ner {

// SEER values in (-1e-12, 0) are treated as rounding noise and clamped to 0.
inline constexpr double kSeerRoundingSlack = 1e-12;
double clamp_seer(double value);

struct ChainStep {
  IndexSet index_set;
  double min_emp_risk = 0.0;
  Eigen::VectorXd coefficients;
};

// Sequentially nested family: each step's index set contains the previous
// one, and seers[k] is the drop in minimum empirical risk from steps[k] to
// steps[k + 1].
struct NestedChain {
  std::vector<ChainStep> steps;
  std::vector<double> seers;

  bool is_nested() const;
};

struct ErmFit {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd residual;
  double min_emp_risk = 0.0;
  bool rank_deficient = false;
};

// (1/n) * sum_i (y_i - <x_i restricted to active, theta>)^2. The empty set is
// the model without any prediction and scores ||y||^2 / n.
double empirical_risk(const Dataset& data, const IndexSet& active, const Eigen::VectorXd& theta);

// Least-squares empirical risk minimizer over the span of the active features.
ErmFit erm(const Dataset& data, const IndexSet& active);

// Successive empirical excess risk erm(smaller) - erm(larger). Throws
// std::invalid_argument unless smaller is a subset of larger.
double seer(const Dataset& data, const IndexSet& smaller, const IndexSet& larger);

// Cumulative, order-preserving union: step k is the union of the first k sets.
std::vector<IndexSet> nest(std::span<const IndexSet> model_sets);

// Fits every set of a nested sequence and records risks and SEERs. Throws if
// the sequence is not nested.
NestedChain evaluate_chain(const Dataset& data, std::span<const IndexSet> nested_sets);

// Chain whose step k (1-based) holds the first group_size * k entries of order.
NestedChain chain_from_order(const Dataset& data, std::span<const std::size_t> order,
                             std::size_t depth, std::size_t group_size = 1);

// Index sets of chain_from_order without fitting anything.
std::vector<IndexSet> prefix_sets(std::span<const std::size_t> order, std::size_t depth,
                                  std::size_t group_size);

}  // namespace ner
