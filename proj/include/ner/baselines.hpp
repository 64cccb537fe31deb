#pragma once

#include "ner/dataset.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace ner {

enum class SortAlgorithm { omp, lars, ridge_weight };
std::string_view to_string(SortAlgorithm algorithm);

// Feature indices (zero-based) in the order a sorter ranked them.
struct SortedFeatures {
  std::vector<std::size_t> order;
  SortAlgorithm algorithm = SortAlgorithm::omp;
};

// Correlations below this fraction of ||y|| count as zero.
inline constexpr double kCorrelationGuard = 1e-12;

// Orthogonal matching pursuit: repeatedly adds argmax_j |<f_j, r>| / ||f_j||
// and refits least squares on the selected set.
SortedFeatures omp_sort(const Dataset& data, std::size_t k_max);

// Least angle regression entry order on unit-norm features.
SortedFeatures lars_sort(const Dataset& data, std::size_t k_max);

struct AidedSelection {
  IndexSet selected;
  // Set when the sorter produced fewer than true_k indices.
  bool shortfall = false;
};

// First true_k sorted indices.
AidedSelection aided_select(const SortedFeatures& sorted, std::size_t true_k);

enum class InformationCriterion { aic, bic };

// Gaussian information criterion n ln(RSS / n) + penalty * k on the prefix
// chain of sorted (k = 0 included). RSS / n is floored at 1e-300.
double information_criterion(InformationCriterion criterion, double rss, std::size_t n,
                             std::size_t k);

// Residual norms below this fraction of ||y|| are treated as exact fits by ic_select.
inline constexpr double kExactFitRatio = 1e-12;

// Prefix of sorted.order minimizing the criterion; ties go to the shorter prefix.
IndexSet ic_select(const Dataset& data, const SortedFeatures& sorted,
                   InformationCriterion criterion);

}  // namespace ner
