#include "ner/model.hpp"

#include "ner/log.hpp"
#include "ner/numerics.hpp"

#include <atomic>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>

namespace ner {

namespace log {

namespace {
std::atomic<bool> g_warnings{true};
std::mutex g_mutex;
}  // namespace

void warn(std::string_view message) {
  if (!g_warnings.load(std::memory_order_relaxed)) return;
  std::lock_guard lock(g_mutex);
  std::cerr << "warning: " << message << '\n';
}

void set_warnings_enabled(bool enabled) { g_warnings.store(enabled); }
bool warnings_enabled() { return g_warnings.load(); }

}  // namespace log

double clamp_seer(double value) {
  return (value < 0.0 && value > -kSeerRoundingSlack) ? 0.0 : value;
}

bool NestedChain::is_nested() const {
  for (std::size_t k = 1; k < steps.size(); ++k)
    if (!steps[k - 1].index_set.is_subset_of(steps[k].index_set)) return false;
  return true;
}

double empirical_risk(const Dataset& data, const IndexSet& active, const Eigen::VectorXd& theta) {
  if (static_cast<std::size_t>(theta.size()) != active.size())
    throw std::invalid_argument("empirical_risk: theta has " + std::to_string(theta.size()) +
                                " entries for " + std::to_string(active.size()) +
                                " active features");
  const double n = static_cast<double>(data.sample_count());
  if (active.empty()) return data.responses().squaredNorm() / n;
  return (data.responses() - data.active_design(active) * theta).squaredNorm() / n;
}

ErmFit erm(const Dataset& data, const IndexSet& active) {
  const double n = static_cast<double>(data.sample_count());
  ErmFit out;
  if (active.empty()) {
    out.residual = data.responses();
    out.min_emp_risk = out.residual.squaredNorm() / n;
    return out;
  }
  if (active.size() > data.sample_count())
    log::warn("erm: " + std::to_string(active.size()) + " active features exceed " +
              std::to_string(data.sample_count()) + " samples");
  LeastSquaresFit fit = fit_least_squares(data.active_design(active), data.responses());
  out.coefficients = std::move(fit.coefficients);
  out.residual = std::move(fit.residual);
  out.min_emp_risk = fit.residual_norm2 / n;
  out.rank_deficient = fit.rank_deficient;
  return out;
}

double seer(const Dataset& data, const IndexSet& smaller, const IndexSet& larger) {
  if (!smaller.is_subset_of(larger))
    throw std::invalid_argument("seer: the smaller model is not nested in the larger one");
  return clamp_seer(erm(data, smaller).min_emp_risk - erm(data, larger).min_emp_risk);
}

std::vector<IndexSet> nest(std::span<const IndexSet> model_sets) {
  std::vector<IndexSet> out;
  out.reserve(model_sets.size());
  IndexSet running;
  for (const IndexSet& s : model_sets) {
    running.merge(s);
    out.push_back(running);
  }
  return out;
}

NestedChain evaluate_chain(const Dataset& data, std::span<const IndexSet> nested_sets) {
  NestedChain chain;
  chain.steps.reserve(nested_sets.size());
  for (const IndexSet& s : nested_sets) {
    if (!chain.steps.empty() && !chain.steps.back().index_set.is_subset_of(s))
      throw std::invalid_argument("evaluate_chain: index sets are not sequentially nested");
    ErmFit fit = erm(data, s);
    if (!chain.steps.empty())
      chain.seers.push_back(clamp_seer(chain.steps.back().min_emp_risk - fit.min_emp_risk));
    chain.steps.push_back({s, fit.min_emp_risk, std::move(fit.coefficients)});
  }
  return chain;
}

std::vector<IndexSet> prefix_sets(std::span<const std::size_t> order, std::size_t depth,
                                  std::size_t group_size) {
  if (group_size == 0) throw std::invalid_argument("group size must be positive");
  if (depth == 0) throw std::invalid_argument("chain depth must be positive");
  if (depth * group_size > order.size())
    throw std::invalid_argument("chain depth " + std::to_string(depth) + " with groups of " +
                                std::to_string(group_size) + " needs " +
                                std::to_string(depth * group_size) + " indices, order has " +
                                std::to_string(order.size()));
  std::vector<IndexSet> sets;
  sets.reserve(depth);
  IndexSet running;
  for (std::size_t k = 0; k < depth; ++k) {
    for (std::size_t i = k * group_size; i < (k + 1) * group_size; ++i) running.insert(order[i]);
    sets.push_back(running);
  }
  return sets;
}

NestedChain chain_from_order(const Dataset& data, std::span<const std::size_t> order,
                             std::size_t depth, std::size_t group_size) {
  const std::vector<IndexSet> sets = prefix_sets(order, depth, group_size);
  return evaluate_chain(data, sets);
}

}  // namespace ner
