#include "ner/selection.hpp"

#include "ner/numerics.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace ner {

ThresholdRule ThresholdRule::constant(double gamma) {
  if (!(gamma >= 0)) throw std::invalid_argument("threshold must be nonnegative");
  return {[](const Eigen::VectorXd&) { return 0.0; },
          [gamma](std::size_t, std::size_t, double) { return gamma; }};
}

bool ner_test(double delta_r, double gamma) {
  if (!(gamma >= 0)) throw std::invalid_argument("ner_test: gamma must be nonnegative");
  return delta_r >= gamma;
}

std::size_t ner_select(std::span<const double> seers, std::span<const double> thresholds) {
  if (seers.size() != thresholds.size())
    throw std::invalid_argument("ner_select: " + std::to_string(seers.size()) + " seers but " +
                                std::to_string(thresholds.size()) + " thresholds");
  std::size_t k_hat = 1;
  for (std::size_t i = 0; i < seers.size(); ++i)
    if (ner_test(seers[i], thresholds[i])) k_hat = i + 2;
  return k_hat;
}

namespace {

struct Candidate {
  std::size_t unit = 0;
  double seer = 0.0;
  Eigen::VectorXd residual;
};

// Keeps every remaining pool feature orthogonalized against the span of the
// accepted features, so a candidate's risk drop is (d^T r)^2 / ||d||^2 with d
// its deflated column and r the current residual.
class ForwardProjector {
 public:
  ForwardProjector(const Dataset& data, std::span<const std::size_t> pool)
      : deflated_(static_cast<Eigen::Index>(data.sample_count()),
                  static_cast<Eigen::Index>(pool.size())),
        original_norms_(static_cast<Eigen::Index>(pool.size())),
        remaining_(pool.size(), true),
        residual_(data.responses()) {
    for (std::size_t c = 0; c < pool.size(); ++c) {
      const auto col = static_cast<Eigen::Index>(c);
      deflated_.col(col) = data.feature(pool[c]);
      original_norms_(col) = deflated_.col(col).norm();
    }
    basis_.resize(deflated_.rows(), 0);
  }

  const Eigen::VectorXd& residual() const { return residual_; }

  // Best remaining column; ties go to the lowest feature index.
  Candidate best(std::span<const std::size_t> pool) const {
    const Eigen::VectorXd proj = deflated_.transpose() * residual_;
    const Eigen::VectorXd norms2 = deflated_.colwise().squaredNorm().transpose();
    const double n = static_cast<double>(residual_.size());

    Candidate out;
    double best_gain = -1.0;
    std::size_t best_feature = std::numeric_limits<std::size_t>::max();
    for (std::size_t c = 0; c < pool.size(); ++c) {
      if (!remaining_[c]) continue;
      const auto col = static_cast<Eigen::Index>(c);
      const double gain = dependent(col) ? 0.0 : proj(col) * proj(col) / norms2(col);
      if (gain > best_gain || (gain == best_gain && pool[c] < best_feature)) {
        best_gain = gain;
        best_feature = pool[c];
        out.unit = c;
      }
    }
    const auto col = static_cast<Eigen::Index>(out.unit);
    out.seer = best_gain / n;
    out.residual = residual_;
    if (best_gain > 0.0) out.residual -= (proj(col) / norms2(col)) * deflated_.col(col);
    return out;
  }

  void accept(std::size_t unit) {
    remaining_[unit] = false;
    const auto col = static_cast<Eigen::Index>(unit);
    if (dependent(col)) return;  // span unchanged

    Eigen::VectorXd q = deflated_.col(col);
    q.normalize();
    if (basis_.cols() > 0) {
      q -= basis_ * (basis_.transpose() * q);
      q.normalize();
    }
    for (Eigen::Index c = 0; c < deflated_.cols(); ++c)
      if (remaining_[static_cast<std::size_t>(c)]) deflated_.col(c) -= q * q.dot(deflated_.col(c));
    residual_ -= q * q.dot(residual_);
    basis_.conservativeResize(Eigen::NoChange, basis_.cols() + 1);
    basis_.col(basis_.cols() - 1) = q;
  }

 private:
  bool dependent(Eigen::Index col) const {
    return deflated_.col(col).norm() <= kRankTolerance * original_norms_(col);
  }

  Eigen::MatrixXd deflated_;
  Eigen::VectorXd original_norms_;
  std::vector<bool> remaining_;
  Eigen::VectorXd residual_;
  Eigen::MatrixXd basis_;
};

void validate_pool(const Dataset& data, std::span<const std::size_t> pool) {
  if (pool.empty()) throw std::invalid_argument("sner: candidate pool is empty");
  IndexSet seen;
  for (std::size_t j : pool) {
    if (j >= data.feature_count())
      throw std::out_of_range("sner: pool index " + std::to_string(j + 1) + " outside [1, " +
                              std::to_string(data.feature_count()) + "]");
    seen.insert(j);
  }
}

}  // namespace

SelectionResult sner(const Dataset& data, std::span<const std::size_t> pool,
                     const ThresholdRule& rule, std::size_t k_max, std::size_t group_size) {
  validate_pool(data, pool);
  if (group_size == 0) throw std::invalid_argument("sner: group size must be positive");
  const std::size_t capacity = (pool.size() + group_size - 1) / group_size;
  if (k_max == 0 || k_max > capacity)
    throw std::invalid_argument("sner: k_max " + std::to_string(k_max) + " outside [1, " +
                                std::to_string(capacity) + "]");
  if (!rule.threshold) throw std::invalid_argument("sner: threshold rule has no evaluator");

  const std::size_t n = data.sample_count();
  const double dn = static_cast<double>(n);

  std::vector<IndexSet> units(capacity);
  for (std::size_t i = 0; i < pool.size(); ++i) units[i / group_size].insert(pool[i]);
  std::vector<bool> remaining(capacity, true);

  SelectionResult result;
  result.group_size = group_size;
  double current_risk = data.responses().squaredNorm() / dn;
  result.chain.steps.push_back({IndexSet{}, current_risk, Eigen::VectorXd{}});

  ForwardProjector projector(data, group_size == 1 ? pool : std::span<const std::size_t>{});

  for (std::size_t k = 1; k <= k_max; ++k) {
    Candidate cand;
    if (group_size == 1) {
      cand = projector.best(pool);
    } else {
      double best_risk = std::numeric_limits<double>::infinity();
      std::size_t best_feature = std::numeric_limits<std::size_t>::max();
      for (std::size_t u = 0; u < capacity; ++u) {
        if (!remaining[u]) continue;
        IndexSet trial = result.selected;
        trial.merge(units[u]);
        ErmFit fit = erm(data, trial);
        const std::size_t lowest = units[u].sorted().front();
        if (fit.min_emp_risk < best_risk ||
            (fit.min_emp_risk == best_risk && lowest < best_feature)) {
          best_risk = fit.min_emp_risk;
          best_feature = lowest;
          cand.unit = u;
          cand.residual = std::move(fit.residual);
        }
      }
      cand.seer = clamp_seer(current_risk - best_risk);
    }

    const double noise = rule.noise_estimate ? rule.noise_estimate(cand.residual) : 0.0;
    const double gamma = rule.threshold(k, n, noise);
    const bool pass = ner_test(cand.seer, gamma);

    result.assigned.push_back(units[cand.unit]);
    result.seers.push_back(cand.seer);
    result.thresholds.push_back(gamma);
    result.noise_estimates.push_back(noise);
    result.tests.push_back(pass);
    if (!pass) break;

    result.selected.merge(units[cand.unit]);
    remaining[cand.unit] = false;
    if (group_size == 1) projector.accept(cand.unit);
    current_risk = cand.residual.squaredNorm() / dn;
    result.chain.seers.push_back(cand.seer);
    result.chain.steps.push_back(
        {result.selected, current_risk, erm(data, result.selected).coefficients});
    ++result.k_hat;
  }

  result.coefficients = result.chain.steps.back().coefficients;
  return result;
}

}  // namespace ner
