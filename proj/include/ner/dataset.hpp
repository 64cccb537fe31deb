#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <span>
#include <vector>

namespace ner {

// Ordered set of distinct feature indices. Zero-based internally; the
// one-based form is only used at file and JSON boundaries.
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(std::initializer_list<std::size_t> indices);
  explicit IndexSet(std::span<const std::size_t> indices);

  static IndexSet from_one_based(std::span<const long long> indices, std::size_t feature_count);

  // Appends index; throws std::invalid_argument if it is already present.
  void insert(std::size_t index);
  // Appends every index of other that is not yet present, in other's order.
  void merge(const IndexSet& other);

  bool contains(std::size_t index) const;
  bool is_subset_of(const IndexSet& other) const;
  bool same_members(const IndexSet& other) const;

  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  std::size_t operator[](std::size_t pos) const { return indices_[pos]; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  const std::vector<std::size_t>& indices() const { return indices_; }
  std::vector<std::size_t> sorted() const;
  std::vector<std::size_t> one_based() const;
  IndexSet prefix(std::size_t count) const;

  // Throws std::out_of_range if any index is >= feature_count.
  void validate(std::size_t feature_count) const;

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::vector<std::size_t> indices_;
};

// Observed sample: L features by n samples plus a response per sample.
// The design is stored samples-by-features (n x L) so that every feature is a
// contiguous column, and shared between copies; a Dataset never mutates it.
class Dataset {
 public:
  // features: L x n (one row per feature).
  Dataset(const Eigen::MatrixXd& features, Eigen::VectorXd responses);

  // design: n x L (one column per feature).
  static Dataset from_design(Eigen::MatrixXd design, Eigen::VectorXd responses);

  std::size_t feature_count() const { return static_cast<std::size_t>(design_->cols()); }
  std::size_t sample_count() const { return static_cast<std::size_t>(design_->rows()); }

  const Eigen::MatrixXd& design() const { return *design_; }
  Eigen::MatrixXd features() const { return design_->transpose(); }
  auto feature(std::size_t j) const { return design_->col(static_cast<Eigen::Index>(j)); }
  const Eigen::VectorXd& responses() const { return responses_; }

  // n x |active| sub-design in the order of active.
  Eigen::MatrixXd active_design(const IndexSet& active) const;

  // Same design, new responses.
  Dataset with_responses(Eigen::VectorXd responses) const;
  // Rows (samples) selected by position.
  Dataset subset_samples(std::span<const std::size_t> rows) const;

 private:
  Dataset(std::shared_ptr<const Eigen::MatrixXd> design, Eigen::VectorXd responses);

  std::shared_ptr<const Eigen::MatrixXd> design_;
  Eigen::VectorXd responses_;
};

}  // namespace ner
