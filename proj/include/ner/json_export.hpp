#pragma once

#include "ner/group_ner.hpp"
#include "ner/linreg.hpp"

#include <json.hpp>

namespace ner {

// {k_hat, selected_indices (1-based), coefficients, seers, thresholds,
//  noise_estimates, tests, c_prime, seed}. Coefficients belong to the pruned
// support in selected_indices order, in the units of the original response.
nlohmann::ordered_json to_json(const RegressionResult& result);

// {selected_indices, chosen_c, tau, k_hat, validation_accuracy, c_grid,
//  k_hat_per_c, validation_error_per_c, seed}.
nlohmann::ordered_json to_json(const GroupNerResult& result, const GroupNerConfig& config);

}  // namespace ner
