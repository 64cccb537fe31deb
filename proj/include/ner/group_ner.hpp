#pragma once

#include "ner/baselines.hpp"
#include "ner/dataset.hpp"
#include "ner/model.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace ner {

// Features with integer class labels in [1, J].
class LabeledDataset {
 public:
  // features: L x n. class_count 0 means "largest label".
  LabeledDataset(const Eigen::MatrixXd& features, std::vector<int> labels,
                 std::size_t class_count = 0);
  static LabeledDataset from_design(Eigen::MatrixXd design, std::vector<int> labels,
                                    std::size_t class_count = 0);

  std::size_t feature_count() const { return static_cast<std::size_t>(design_->cols()); }
  std::size_t sample_count() const { return static_cast<std::size_t>(design_->rows()); }
  std::size_t class_count() const { return class_count_; }
  const Eigen::MatrixXd& design() const { return *design_; }
  const std::vector<int>& labels() const { return labels_; }

  Eigen::MatrixXd active_design(const IndexSet& active) const;
  LabeledDataset subset_samples(std::span<const std::size_t> rows) const;

 private:
  LabeledDataset(std::shared_ptr<const Eigen::MatrixXd> design, std::vector<int> labels,
                 std::size_t class_count);

  std::shared_ptr<const Eigen::MatrixXd> design_;
  std::vector<int> labels_;
  std::size_t class_count_ = 0;
};

struct RidgeModel {
  Eigen::MatrixXd weights;  // |active| x J
  IndexSet active;
  double tau = 1.0;
};

// n x J indicator matrix; row i has a 1 in column labels[i] - 1.
Eigen::MatrixXd one_hot(std::span<const int> labels, std::size_t class_count);

RidgeModel train_ridge(const LabeledDataset& data, const IndexSet& active, double tau);

// Argmax of sample^T W; ties go to the lowest class. sample holds the active
// features only, in model.active order. Returns a label in [1, J].
int predict(const RidgeModel& model, const Eigen::Ref<const Eigen::VectorXd>& sample);

// Fraction of samples of data (full feature rows) classified correctly.
double accuracy(const RidgeModel& model, const LabeledDataset& data);

// Per class, features by descending |weight| (ties to the lower index); the
// class orders are interleaved rank by rank and only the first occurrence of
// each index is kept.
SortedFeatures ridge_weight_sort(const RidgeModel& model);

// Ridge-loss nested chain over groups of an order. risks[k] is
// (||Y - X_k^T W_k||_F^2 + tau ||W_k||_F^2) / n and noise[k] is the sum over
// classes of the mean-centred squared residual norm divided by n - 1.
struct RidgeChain {
  std::vector<IndexSet> sets;
  std::vector<RidgeModel> models;
  std::vector<double> risks;
  std::vector<double> noise;
  std::vector<double> seers;  // seers[i] belongs to step i + 2
  std::size_t sample_count = 0;
};

RidgeChain ridge_chain(const LabeledDataset& data, std::span<const std::size_t> order,
                       std::size_t group_size, std::size_t depth, double tau);

// c (s2_k / n) F1^-1(1 - s2_k / n) for k = 2..depth.
std::vector<double> group_thresholds(const RidgeChain& chain, double c);

// Estimated number of groups for threshold scale c (at least 1).
std::size_t group_order(const RidgeChain& chain, double c);

// {10^-1, 10^-0.75, ..., 10^3}.
std::vector<double> default_c_grid();

struct StratifiedSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

// Per class, round(fraction * count) samples go to validation, but every
// class keeps at least one training sample.
StratifiedSplit stratified_split(std::span<const int> labels, std::size_t class_count,
                                 double validation_fraction, std::uint64_t seed);

struct GroupNerConfig {
  std::size_t group_size = 10;
  std::size_t depth = 1;
  // Unset: chosen from {0.01, 0.1, 1, 10} on the validation split.
  std::optional<double> tau;
  std::vector<double> c_grid = default_c_grid();
  double validation_fraction = 0.2;
  double prune_fraction = 0.1;
  std::uint64_t seed = 0;
};

struct GroupNerResult {
  IndexSet selected;
  double chosen_c = 0.0;
  double tau = 1.0;
  std::size_t k_hat = 1;
  std::vector<std::size_t> k_hat_per_c;
  std::vector<double> validation_error_per_c;
  // Accuracy on the validation split of the pruned model trained on the training split.
  double validation_accuracy = 0.0;
  // Pruned model retrained on every sample.
  RidgeModel model;
  RidgeChain chain;
};

GroupNerResult group_ner_select(const LabeledDataset& data, const SortedFeatures& order,
                                const GroupNerConfig& config);

// Sorts by ridge weights on the full pool, then runs group_ner_select.
GroupNerResult run_group_ner(const LabeledDataset& data, const GroupNerConfig& config);

}  // namespace ner
