#pragma once

#include <optional>
#include <vector>

#include "regencool/mlp.hpp"

namespace regencool {

// Covariate-shift importance weights w_i = p_target(x_i) / p_train(x_i) for
// every training row, from Gaussian-kernel density estimates in standardized
// feature space. Bandwidth defaults to Scott's rule n^(-1/(d+4)) per set;
// ratios are clipped to [0.1, 10] and normalized to mean 1.
std::vector<double> kde_importance_weights(const Matrix& train_features,
                                           const Matrix& target_features,
                                           std::optional<double> bandwidth = std::nullopt);

} // namespace regencool
