#include "ner/json_export.hpp"

#include <vector>

namespace ner {

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

nlohmann::ordered_json to_json(const RegressionResult& result) {
  const SelectionResult& s = result.selection;
  nlohmann::ordered_json j;
  j["k_hat"] = s.k_hat;
  j["selected_indices"] = result.support.one_based();
  j["coefficients"] = to_vector(result.coefficients);
  j["seers"] = s.seers;
  j["thresholds"] = s.thresholds;
  j["noise_estimates"] = s.noise_estimates;
  j["tests"] = s.tests;
  j["c_prime"] = result.c_prime;
  j["seed"] = result.seed;
  return j;
}

nlohmann::ordered_json to_json(const GroupNerResult& result, const GroupNerConfig& config) {
  nlohmann::ordered_json j;
  j["selected_indices"] = result.selected.one_based();
  j["chosen_c"] = result.chosen_c;
  j["tau"] = result.tau;
  j["k_hat"] = result.k_hat;
  j["group_size"] = config.group_size;
  j["depth"] = config.depth;
  j["validation_accuracy"] = result.validation_accuracy;
  j["c_grid"] = config.c_grid;
  j["k_hat_per_c"] = result.k_hat_per_c;
  j["validation_error_per_c"] = result.validation_error_per_c;
  j["seed"] = config.seed;
  return j;
}

}  // namespace ner
