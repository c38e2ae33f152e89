#include "regencool/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "regencool/errors.hpp"

namespace regencool {

TrainResult fit_model(const Dataset& train_ds, const Dataset& val_ds, const FeatureSpec& spec,
                      const HyperParams& hp, std::span<const double> sample_weights) {
    const Matrix x_train = feature_matrix(train_ds, spec);
    const Matrix x_val = feature_matrix(val_ds, spec);
    return train(x_train, train_ds.labels(), x_val, val_ds.labels(), spec.names, hp,
                 sample_weights);
}

std::vector<double> predict(const Mlp& model, const ScalerParams& scaler, const Dataset& ds) {
    FeatureSpec spec{scaler.feature_names};
    const Matrix x = feature_matrix(ds, spec);
    if (x.cols != model.input_dim()) {
        throw ValidationError("predict: feature dimension mismatch");
    }
    const Matrix xs = scaler.transform(x);
    std::vector<double> out(ds.size());
    for (std::size_t i = 0; i < xs.rows; ++i) out[i] = forward(model, xs.row(i));
    return out;
}

EvalMetrics evaluate(const Mlp& model, const ScalerParams& scaler, const Dataset& ds) {
    if (ds.size() == 0) throw ValidationError("evaluate: empty dataset");
    const std::vector<double> pred = predict(model, scaler, ds);
    const std::vector<double>& truth = ds.labels();

    EvalMetrics m;
    m.n = ds.size();
    std::vector<double> abs_err(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        abs_err[i] = std::abs(truth[i] - pred[i]);
        m.mae += abs_err[i];
        m.mape += abs_err[i] / std::abs(truth[i]);
    }
    m.mae /= static_cast<double>(m.n);
    m.mape /= static_cast<double>(m.n);
    for (double e : abs_err) m.std_abs_err += (e - m.mae) * (e - m.mae);
    m.std_abs_err = std::sqrt(m.std_abs_err / static_cast<double>(m.n));
    return m;
}

double mape(std::span<const double> truth, std::span<const double> approx) {
    if (truth.size() != approx.size() || truth.empty()) {
        throw ValidationError("mape: series must be non-empty and equally long");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        acc += std::abs(truth[i] - approx[i]) / std::abs(truth[i]);
    }
    return acc / static_cast<double>(truth.size());
}

HeatmapGrid heatmap_grid(const Mlp& model, const ScalerParams& scaler, const std::string& x_feature,
                         const std::string& y_feature, std::pair<double, double> x_range,
                         std::pair<double, double> y_range, std::size_t resolution,
                         const std::map<std::string, double>& fixed) {
    if (resolution < 2) throw ValidationError("heatmap_grid: resolution must be >= 2");
    if (x_feature == y_feature) throw ValidationError("heatmap_grid: features must be distinct");
    if (!(x_range.second > x_range.first) || !(y_range.second > y_range.first)) {
        throw ValidationError("heatmap_grid: degenerate axis range");
    }
    const auto& names = scaler.feature_names;
    auto index_of = [&](const std::string& n) {
        const auto it = std::find(names.begin(), names.end(), n);
        if (it == names.end()) {
            throw ValidationError("heatmap_grid: feature '" + n + "' not in the model inputs");
        }
        return static_cast<std::size_t>(it - names.begin());
    };
    const std::size_t xi = index_of(x_feature), yi = index_of(y_feature);

    std::vector<double> base(names.size());
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (j == xi || j == yi) continue;
        const auto it = fixed.find(names[j]);
        if (it == fixed.end()) {
            throw ValidationError("heatmap_grid: missing fixed value for feature '" + names[j] +
                                  "'");
        }
        base[j] = it->second;
    }

    HeatmapGrid grid;
    grid.x.resize(resolution);
    grid.y.resize(resolution);
    for (std::size_t i = 0; i < resolution; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(resolution - 1);
        grid.x[i] = x_range.first + t * (x_range.second - x_range.first);
        grid.y[i] = y_range.first + t * (y_range.second - y_range.first);
    }
    grid.values.resize(resolution * resolution);
    std::vector<double> x(base), xs(base.size());
    for (std::size_t row = 0; row < resolution; ++row) {
        for (std::size_t col = 0; col < resolution; ++col) {
            x = base;
            x[xi] = grid.x[col];
            x[yi] = grid.y[row];
            scaler.transform(x, xs);
            grid.values[row * resolution + col] = forward(model, xs);
        }
    }
    return grid;
}

void write_heatmap_csv(std::ostream& out, const HeatmapGrid& grid) {
    char buf[64];
    for (double x : grid.x) {
        std::snprintf(buf, sizeof buf, ",%.17g", x);
        out << buf;
    }
    out << "\n";
    for (std::size_t row = 0; row < grid.y.size(); ++row) {
        std::snprintf(buf, sizeof buf, "%.17g", grid.y[row]);
        out << buf;
        for (std::size_t col = 0; col < grid.x.size(); ++col) {
            std::snprintf(buf, sizeof buf, ",%.17g", grid.values[row * grid.x.size() + col]);
            out << buf;
        }
        out << "\n";
    }
}

namespace {

HyperParams sample_point(const SearchSpace& space, Rng& rng, std::uint64_t train_seed) {
    HyperParams hp;
    hp.n_hidden_layers =
        static_cast<int>(rng.uniform_int(space.hidden_layers.lo, space.hidden_layers.hi));
    hp.neurons_per_layer = static_cast<int>(rng.uniform_int(space.neurons.lo, space.neurons.hi));
    hp.alpha_l2 = space.alpha_l2.lo == space.alpha_l2.hi
                      ? space.alpha_l2.lo
                      : rng.log_uniform(space.alpha_l2.lo, space.alpha_l2.hi);
    hp.learning_rate = space.learning_rate.lo == space.learning_rate.hi
                           ? space.learning_rate.lo
                           : rng.log_uniform(space.learning_rate.lo, space.learning_rate.hi);
    hp.minibatch_size = static_cast<int>(rng.uniform_int(space.minibatch.lo, space.minibatch.hi));
    hp.epochs = static_cast<int>(rng.uniform_int(space.epochs.lo, space.epochs.hi));
    hp.rng_seed = train_seed;
    return hp;
}

} // namespace

std::vector<TrialResult> random_search(const SearchSpace& space, int n_trials,
                                       const Dataset& train_ds, const Dataset& val_ds,
                                       const FeatureSpec& spec, std::uint64_t seed, int workers) {
    if (n_trials < 1) throw ValidationError("random_search: need at least one trial");
    if (workers < 1) throw ValidationError("random_search: need at least one worker");

    // all configurations come from one seeded stream; every trial trains with
    // rng_seed = seed so that identical configurations give identical metrics
    Rng rng(seed);
    std::vector<TrialResult> trials(static_cast<std::size_t>(n_trials));
    for (auto& t : trials) t.hp = sample_point(space, rng, seed);

    const Matrix x_train = feature_matrix(train_ds, spec);
    const Matrix x_val = feature_matrix(val_ds, spec);
    const auto& y_train = train_ds.labels();
    const auto& y_val = val_ds.labels();

    std::atomic<std::size_t> next{0};
    auto run_trials = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= trials.size()) return;
            TrialResult& t = trials[i];
            try {
                const TrainResult r =
                    train(x_train, y_train, x_val, y_val, spec.names, t.hp, {});
                if (r.report.diverged || r.report.val_mae.empty()) {
                    t.failed = true;
                } else {
                    t.val_mae = r.report.val_mae.back();
                    t.val_mae_std = r.report.val_mae_std.back();
                }
            } catch (const Error&) {
                t.failed = true;
            }
        }
    };

    if (workers == 1) {
        run_trials();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int i = 0; i < workers; ++i) pool.emplace_back(run_trials);
        for (auto& th : pool) th.join();
    }

    std::stable_sort(trials.begin(), trials.end(), [](const TrialResult& a, const TrialResult& b) {
        if (a.failed != b.failed) return !a.failed;
        return a.val_mae < b.val_mae;
    });
    return trials;
}

void write_search_csv(std::ostream& out, const std::vector<TrialResult>& trials) {
    out << "rank,hidden_layers,neurons_per_layer,alpha_l2,minibatch_size,epochs,learning_rate,"
           "seed,val_mae[K],val_mae_std[K],status\n";
    char buf[256];
    for (std::size_t i = 0; i < trials.size(); ++i) {
        const TrialResult& t = trials[i];
        std::snprintf(buf, sizeof buf, "%zu,%d,%d,%.17g,%d,%d,%.17g,%llu,%.17g,%.17g,%s\n", i + 1,
                      t.hp.n_hidden_layers, t.hp.neurons_per_layer, t.hp.alpha_l2,
                      t.hp.minibatch_size, t.hp.epochs, t.hp.learning_rate,
                      static_cast<unsigned long long>(t.hp.rng_seed), t.val_mae, t.val_mae_std,
                      t.failed ? "failed" : "ok");
        out << buf;
    }
}

} // namespace regencool
