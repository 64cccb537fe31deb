#include "ner/group_ner.hpp"

#include "ner/numerics.hpp"
#include "ner/random.hpp"
#include "ner/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ner {

namespace {

std::size_t infer_class_count(const std::vector<int>& labels, std::size_t class_count) {
  if (class_count == 0 && !labels.empty())
    class_count = static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end()));
  return class_count;
}

}  // namespace

LabeledDataset::LabeledDataset(std::shared_ptr<const Eigen::MatrixXd> design,
                               std::vector<int> labels, std::size_t class_count)
    : design_(std::move(design)), labels_(std::move(labels)) {
  class_count_ = infer_class_count(labels_, class_count);
  if (design_->cols() < 1 || design_->rows() < 1)
    throw std::invalid_argument("labeled dataset needs at least one feature and one sample");
  if (labels_.size() != static_cast<std::size_t>(design_->rows()))
    throw std::invalid_argument("labeled dataset has " + std::to_string(design_->rows()) +
                                " samples but " + std::to_string(labels_.size()) + " labels");
  if (class_count_ < 2) throw std::invalid_argument("labeled dataset needs at least 2 classes");
  for (int l : labels_)
    if (l < 1 || static_cast<std::size_t>(l) > class_count_)
      throw std::invalid_argument("label " + std::to_string(l) + " outside [1, " +
                                  std::to_string(class_count_) + "]");
  if (!design_->allFinite()) throw std::invalid_argument("labeled dataset has non-finite features");
}

LabeledDataset::LabeledDataset(const Eigen::MatrixXd& features, std::vector<int> labels,
                               std::size_t class_count)
    : LabeledDataset(std::make_shared<const Eigen::MatrixXd>(features.transpose()),
                     std::move(labels), class_count) {}

LabeledDataset LabeledDataset::from_design(Eigen::MatrixXd design, std::vector<int> labels,
                                           std::size_t class_count) {
  return LabeledDataset(std::make_shared<const Eigen::MatrixXd>(std::move(design)),
                        std::move(labels), class_count);
}

Eigen::MatrixXd LabeledDataset::active_design(const IndexSet& active) const {
  active.validate(feature_count());
  Eigen::MatrixXd sub(design_->rows(), static_cast<Eigen::Index>(active.size()));
  for (std::size_t c = 0; c < active.size(); ++c)
    sub.col(static_cast<Eigen::Index>(c)) = design_->col(static_cast<Eigen::Index>(active[c]));
  return sub;
}

LabeledDataset LabeledDataset::subset_samples(std::span<const std::size_t> rows) const {
  Eigen::MatrixXd design(static_cast<Eigen::Index>(rows.size()), design_->cols());
  std::vector<int> labels(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    design.row(static_cast<Eigen::Index>(r)) = design_->row(static_cast<Eigen::Index>(rows[r]));
    labels[r] = labels_.at(rows[r]);
  }
  return LabeledDataset(std::make_shared<const Eigen::MatrixXd>(std::move(design)),
                        std::move(labels), class_count_);
}

Eigen::MatrixXd one_hot(std::span<const int> labels, std::size_t class_count) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()),
                                            static_cast<Eigen::Index>(class_count));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 1 || static_cast<std::size_t>(labels[i]) > class_count)
      throw std::invalid_argument("one_hot: label " + std::to_string(labels[i]) + " outside [1, " +
                                  std::to_string(class_count) + "]");
    y(static_cast<Eigen::Index>(i), labels[i] - 1) = 1.0;
  }
  return y;
}

RidgeModel train_ridge(const LabeledDataset& data, const IndexSet& active, double tau) {
  if (active.empty()) throw std::invalid_argument("train_ridge: empty feature set");
  RidgeModel model;
  model.active = active;
  model.tau = tau;
  model.weights = ridge_solve_design(data.active_design(active),
                                     one_hot(data.labels(), data.class_count()), tau);
  return model;
}

int predict(const RidgeModel& model, const Eigen::Ref<const Eigen::VectorXd>& sample) {
  if (static_cast<std::size_t>(sample.size()) != model.active.size() ||
      model.weights.rows() != sample.size())
    throw std::invalid_argument("predict: sample has " + std::to_string(sample.size()) +
                                " features, model expects " + std::to_string(model.active.size()));
  const Eigen::VectorXd scores = model.weights.transpose() * sample;
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < scores.size(); ++j)
    if (scores(j) > scores(best)) best = j;
  return static_cast<int>(best) + 1;
}

double accuracy(const RidgeModel& model, const LabeledDataset& data) {
  if (data.sample_count() == 0) return 0.0;
  const Eigen::MatrixXd x = data.active_design(model.active);
  std::size_t hits = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    if (predict(model, x.row(i).transpose()) == data.labels()[static_cast<std::size_t>(i)]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(data.sample_count());
}

SortedFeatures ridge_weight_sort(const RidgeModel& model) {
  const std::size_t m = model.active.size();
  const auto classes = static_cast<std::size_t>(model.weights.cols());
  std::vector<std::vector<std::size_t>> per_class(classes);
  for (std::size_t j = 0; j < classes; ++j) {
    std::vector<std::size_t> pos(m);
    std::iota(pos.begin(), pos.end(), std::size_t{0});
    const auto col = model.weights.col(static_cast<Eigen::Index>(j));
    std::sort(pos.begin(), pos.end(), [&](std::size_t a, std::size_t b) {
      const double wa = std::abs(col(static_cast<Eigen::Index>(a)));
      const double wb = std::abs(col(static_cast<Eigen::Index>(b)));
      if (wa != wb) return wa > wb;
      return model.active[a] < model.active[b];
    });
    for (std::size_t p : pos) per_class[j].push_back(model.active[p]);
  }

  SortedFeatures out{{}, SortAlgorithm::ridge_weight};
  std::vector<bool> seen;
  for (std::size_t rank = 0; rank < m; ++rank)
    for (std::size_t j = 0; j < classes; ++j) {
      const std::size_t idx = per_class[j][rank];
      if (idx >= seen.size()) seen.resize(idx + 1, false);
      if (!seen[idx]) {
        seen[idx] = true;
        out.order.push_back(idx);
      }
    }
  return out;
}

RidgeChain ridge_chain(const LabeledDataset& data, std::span<const std::size_t> order,
                       std::size_t group_size, std::size_t depth, double tau) {
  if (!(tau > 0)) throw std::invalid_argument("ridge_chain: tau must be positive");
  RidgeChain chain;
  chain.sets = prefix_sets(order, depth, group_size);
  chain.sample_count = data.sample_count();
  const double n = static_cast<double>(data.sample_count());
  const Eigen::MatrixXd y = one_hot(data.labels(), data.class_count());

  for (const IndexSet& set : chain.sets) {
    const Eigen::MatrixXd x = data.active_design(set);
    RidgeModel model{ridge_solve_design(x, y, tau), set, tau};
    const Eigen::MatrixXd resid = y - x * model.weights;
    chain.risks.push_back((resid.squaredNorm() + tau * model.weights.squaredNorm()) / n);
    const Eigen::MatrixXd centred = resid.rowwise() - resid.colwise().mean();
    chain.noise.push_back(centred.squaredNorm() / (n - 1.0));
    if (chain.models.size() > 0)
      chain.seers.push_back(clamp_seer(chain.risks[chain.risks.size() - 2] - chain.risks.back()));
    chain.models.push_back(std::move(model));
  }
  return chain;
}

std::vector<double> group_thresholds(const RidgeChain& chain, double c) {
  if (!(c > 0)) throw std::invalid_argument("group threshold scale must be positive");
  const double n = static_cast<double>(chain.sample_count);
  std::vector<double> out;
  for (std::size_t k = 1; k < chain.noise.size(); ++k) {
    const double scaled = chain.noise[k] / n;
    out.push_back(c * scaled * double(chi2_1_inv_cdf(clamp_probability(1.0 - scaled))));
  }
  return out;
}

std::size_t group_order(const RidgeChain& chain, double c) {
  return ner_select(chain.seers, group_thresholds(chain, c));
}

std::vector<double> default_c_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 16; ++i) grid.push_back(std::pow(10.0, -1.0 + 0.25 * i));
  return grid;
}

StratifiedSplit stratified_split(std::span<const int> labels, std::size_t class_count,
                                 double validation_fraction, std::uint64_t seed) {
  if (!(validation_fraction > 0 && validation_fraction < 1))
    throw std::invalid_argument("validation fraction must lie in (0, 1)");
  std::vector<std::vector<std::size_t>> by_class(class_count);
  for (std::size_t i = 0; i < labels.size(); ++i)
    by_class.at(static_cast<std::size_t>(labels[i] - 1)).push_back(i);

  StratifiedSplit split;
  for (std::size_t j = 0; j < class_count; ++j) {
    auto& members = by_class[j];
    CounterRng rng = CounterRng::stream(seed, j);
    const std::vector<std::size_t> perm = random_permutation(rng, members.size());
    std::size_t n_val = static_cast<std::size_t>(
        std::llround(validation_fraction * static_cast<double>(members.size())));
    if (members.size() >= 1) n_val = std::min(n_val, members.size() - 1);
    for (std::size_t p = 0; p < perm.size(); ++p)
      (p < n_val ? split.validation : split.train).push_back(members[perm[p]]);
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.validation.begin(), split.validation.end());
  return split;
}

namespace {

double choose_tau(const LabeledDataset& train, const LabeledDataset& validation,
                  const IndexSet& pool) {
  double best_tau = 0.01;
  double best_acc = -1.0;
  for (double tau : {0.01, 0.1, 1.0, 10.0}) {
    const double acc = accuracy(train_ridge(train, pool, tau), validation);
    if (acc > best_acc) {
      best_acc = acc;
      best_tau = tau;
    }
  }
  return best_tau;
}

IndexSet prune_by_weight(const RidgeModel& model, double fraction) {
  const Eigen::VectorXd row_max = model.weights.cwiseAbs().rowwise().maxCoeff();
  const double cutoff = fraction * row_max.maxCoeff();
  IndexSet kept;
  for (std::size_t i = 0; i < model.active.size(); ++i)
    if (row_max(static_cast<Eigen::Index>(i)) >= cutoff) kept.insert(model.active[i]);
  return kept;
}

IndexSet all_features(std::size_t count) {
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return IndexSet(idx);
}

}  // namespace

GroupNerResult group_ner_select(const LabeledDataset& data, const SortedFeatures& order,
                                const GroupNerConfig& config) {
  if (config.c_grid.empty()) throw std::invalid_argument("group_ner_select: empty c grid");
  if (!(config.prune_fraction >= 0 && config.prune_fraction < 1))
    throw std::invalid_argument("group_ner_select: prune fraction must lie in [0, 1)");
  if (config.group_size == 0 || config.depth == 0)
    throw std::invalid_argument("group_ner_select: group size and depth must be positive");
  if (config.group_size * config.depth > order.order.size())
    throw std::invalid_argument("group_ner_select: " + std::to_string(config.depth) +
                                " groups of " + std::to_string(config.group_size) +
                                " exceed the " + std::to_string(order.order.size()) +
                                " sorted features");

  const StratifiedSplit split = stratified_split(data.labels(), data.class_count(),
                                                 config.validation_fraction, config.seed);
  const LabeledDataset train = data.subset_samples(split.train);
  const LabeledDataset validation = data.subset_samples(split.validation);

  GroupNerResult out;
  out.tau = config.tau ? *config.tau : choose_tau(train, validation, all_features(data.feature_count()));
  out.chain = ridge_chain(train, order.order, config.group_size, config.depth, out.tau);

  std::size_t best = 0;
  for (std::size_t g = 0; g < config.c_grid.size(); ++g) {
    const std::size_t k = group_order(out.chain, config.c_grid[g]);
    out.k_hat_per_c.push_back(k);
    out.validation_error_per_c.push_back(1.0 - accuracy(out.chain.models[k - 1], validation));
    const double err = out.validation_error_per_c.back();
    const double best_err = out.validation_error_per_c[best];
    if (err < best_err || (err == best_err && config.c_grid[g] < config.c_grid[best])) best = g;
  }
  out.chosen_c = config.c_grid[best];
  out.k_hat = out.k_hat_per_c[best];

  out.selected = prune_by_weight(out.chain.models[out.k_hat - 1], config.prune_fraction);
  out.validation_accuracy = accuracy(train_ridge(train, out.selected, out.tau), validation);
  out.model = train_ridge(data, out.selected, out.tau);
  return out;
}

GroupNerResult run_group_ner(const LabeledDataset& data, const GroupNerConfig& config) {
  GroupNerConfig cfg = config;
  const IndexSet pool = all_features(data.feature_count());
  if (!cfg.tau) {
    const StratifiedSplit split = stratified_split(data.labels(), data.class_count(),
                                                   cfg.validation_fraction, cfg.seed);
    cfg.tau = choose_tau(data.subset_samples(split.train), data.subset_samples(split.validation),
                         pool);
  }
  const SortedFeatures order = ridge_weight_sort(train_ridge(data, pool, *cfg.tau));
  return group_ner_select(data, order, cfg);
}

}  // namespace ner
