#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "regencool/dataset.hpp"
#include "regencool/mlp.hpp"

namespace regencool {

// Trains on labeled datasets using the given feature layout.
TrainResult fit_model(const Dataset& train_ds, const Dataset& val_ds, const FeatureSpec& spec,
                      const HyperParams& hp, std::span<const double> sample_weights = {});

struct EvalMetrics {
    double mae = 0.0;         // mean |y - y_hat| [K]
    double std_abs_err = 0.0; // population std of |y - y_hat| [K]
    double mape = 0.0;        // mean |y - y_hat| / |y|
    std::size_t n = 0;
};

std::vector<double> predict(const Mlp& model, const ScalerParams& scaler, const Dataset& ds);
EvalMetrics evaluate(const Mlp& model, const ScalerParams& scaler, const Dataset& ds);

// Mean absolute percentage error between two equally long series.
double mape(std::span<const double> truth, std::span<const double> approx);

struct HeatmapGrid {
    std::vector<double> x;      // x_resolution values
    std::vector<double> y;      // y_resolution values
    std::vector<double> values; // row-major, y rows by x columns
};

// Two features swept over a grid, all others held at the given values.
HeatmapGrid heatmap_grid(const Mlp& model, const ScalerParams& scaler, const std::string& x_feature,
                         const std::string& y_feature, std::pair<double, double> x_range,
                         std::pair<double, double> y_range, std::size_t resolution,
                         const std::map<std::string, double>& fixed);

void write_heatmap_csv(std::ostream& out, const HeatmapGrid& grid);

struct IntRange {
    int lo = 1, hi = 1;
};
struct LogRange {
    double lo = 1.0, hi = 1.0;
};

// Hyperparameter search box; learning rate and alpha are sampled
// log-uniformly, the counts uniformly.
struct SearchSpace {
    IntRange hidden_layers{1, 4};
    IntRange neurons{16, 256};
    LogRange alpha_l2{1e-7, 1e-1};
    LogRange learning_rate{1e-4, 1e-2};
    IntRange minibatch{256, 4096};
    IntRange epochs{20, 20};
};

struct TrialResult {
    HyperParams hp;
    double val_mae = 0.0;
    double val_mae_std = 0.0;
    bool failed = false;
};

// Random search: samples n_trials configurations with one seeded stream, then
// trains each with hp.rng_seed = seed, so identical configurations reproduce
// identical metrics. Returns trials ranked by validation MAE; diverged trials
// rank last and are marked failed, not fatal. Trials may run on `workers`
// threads without changing the result.
std::vector<TrialResult> random_search(const SearchSpace& space, int n_trials,
                                       const Dataset& train_ds, const Dataset& val_ds,
                                       const FeatureSpec& spec, std::uint64_t seed,
                                       int workers = 1);

void write_search_csv(std::ostream& out, const std::vector<TrialResult>& trials);

} // namespace regencool
