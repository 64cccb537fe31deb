#include "ner/dataset.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ner {

IndexSet::IndexSet(std::initializer_list<std::size_t> indices) {
  for (std::size_t i : indices) insert(i);
}

IndexSet::IndexSet(std::span<const std::size_t> indices) {
  for (std::size_t i : indices) insert(i);
}

IndexSet IndexSet::from_one_based(std::span<const long long> indices, std::size_t feature_count) {
  IndexSet set;
  for (long long i : indices) {
    if (i < 1 || static_cast<std::size_t>(i) > feature_count)
      throw std::out_of_range("feature index " + std::to_string(i) + " outside [1, " +
                              std::to_string(feature_count) + "]");
    set.insert(static_cast<std::size_t>(i - 1));
  }
  return set;
}

void IndexSet::insert(std::size_t index) {
  if (contains(index))
    throw std::invalid_argument("duplicate feature index " + std::to_string(index + 1));
  indices_.push_back(index);
}

void IndexSet::merge(const IndexSet& other) {
  for (std::size_t i : other.indices_)
    if (!contains(i)) indices_.push_back(i);
}

bool IndexSet::contains(std::size_t index) const {
  return std::find(indices_.begin(), indices_.end(), index) != indices_.end();
}

bool IndexSet::is_subset_of(const IndexSet& other) const {
  return std::all_of(indices_.begin(), indices_.end(),
                     [&](std::size_t i) { return other.contains(i); });
}

bool IndexSet::same_members(const IndexSet& other) const {
  return size() == other.size() && is_subset_of(other);
}

std::vector<std::size_t> IndexSet::sorted() const {
  std::vector<std::size_t> out = indices_;
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> IndexSet::one_based() const {
  std::vector<std::size_t> out = indices_;
  for (auto& i : out) ++i;
  return out;
}

IndexSet IndexSet::prefix(std::size_t count) const {
  IndexSet out;
  out.indices_.assign(indices_.begin(),
                      indices_.begin() + static_cast<std::ptrdiff_t>(std::min(count, size())));
  return out;
}

void IndexSet::validate(std::size_t feature_count) const {
  for (std::size_t i : indices_)
    if (i >= feature_count)
      throw std::out_of_range("feature index " + std::to_string(i + 1) + " outside [1, " +
                              std::to_string(feature_count) + "]");
}

namespace {

void check_dataset(const Eigen::MatrixXd& design, const Eigen::VectorXd& responses) {
  if (design.cols() < 1) throw std::invalid_argument("dataset needs at least one feature");
  if (design.rows() < 1) throw std::invalid_argument("dataset needs at least one sample");
  if (responses.size() != design.rows())
    throw std::invalid_argument("dataset has " + std::to_string(design.rows()) +
                                " samples but " + std::to_string(responses.size()) +
                                " responses");
  if (!design.allFinite()) throw std::invalid_argument("dataset features contain non-finite values");
  if (!responses.allFinite())
    throw std::invalid_argument("dataset responses contain non-finite values");
}

}  // namespace

Dataset::Dataset(std::shared_ptr<const Eigen::MatrixXd> design, Eigen::VectorXd responses)
    : design_(std::move(design)), responses_(std::move(responses)) {
  check_dataset(*design_, responses_);
}

Dataset::Dataset(const Eigen::MatrixXd& features, Eigen::VectorXd responses)
    : Dataset(std::make_shared<const Eigen::MatrixXd>(features.transpose()),
              std::move(responses)) {}

Dataset Dataset::from_design(Eigen::MatrixXd design, Eigen::VectorXd responses) {
  return Dataset(std::make_shared<const Eigen::MatrixXd>(std::move(design)),
                 std::move(responses));
}

Eigen::MatrixXd Dataset::active_design(const IndexSet& active) const {
  active.validate(feature_count());
  Eigen::MatrixXd sub(design_->rows(), static_cast<Eigen::Index>(active.size()));
  for (std::size_t c = 0; c < active.size(); ++c)
    sub.col(static_cast<Eigen::Index>(c)) = design_->col(static_cast<Eigen::Index>(active[c]));
  return sub;
}

Dataset Dataset::with_responses(Eigen::VectorXd responses) const {
  return Dataset(design_, std::move(responses));
}

Dataset Dataset::subset_samples(std::span<const std::size_t> rows) const {
  Eigen::MatrixXd design(static_cast<Eigen::Index>(rows.size()), design_->cols());
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= sample_count()) throw std::out_of_range("sample row out of range");
    design.row(static_cast<Eigen::Index>(r)) = design_->row(static_cast<Eigen::Index>(rows[r]));
    y(static_cast<Eigen::Index>(r)) = responses_(static_cast<Eigen::Index>(rows[r]));
  }
  return from_design(std::move(design), std::move(y));
}

}  // namespace ner
