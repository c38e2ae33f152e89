#include "regencool/mlp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "regencool/errors.hpp"

namespace regencool {

void Mlp::validate() const {
    if (layer_dims.size() < 2) throw ValidationError("mlp: need at least input and output layers");
    if (layer_dims.back() != 1) throw ValidationError("mlp: output layer width must be 1");
    if (weights.size() != layer_dims.size() - 1 || biases.size() != weights.size()) {
        throw ValidationError("mlp: layer count mismatch");
    }
    for (std::size_t l = 0; l < weights.size(); ++l) {
        if (weights[l].rows != layer_dims[l + 1] || weights[l].cols != layer_dims[l] ||
            biases[l].size() != layer_dims[l + 1]) {
            throw ValidationError("mlp: weight shape mismatch at layer " + std::to_string(l));
        }
    }
}

Mlp Mlp::init(const std::vector<std::size_t>& layer_dims, Rng& rng) {
    Mlp m;
    m.layer_dims = layer_dims;
    for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
        Matrix w(layer_dims[l + 1], layer_dims[l]);
        const double bound = std::sqrt(6.0 / static_cast<double>(layer_dims[l] + layer_dims[l + 1]));
        for (double& v : w.a) v = rng.uniform(-bound, bound);
        m.weights.push_back(std::move(w));
        m.biases.emplace_back(layer_dims[l + 1], 0.0);
    }
    m.validate();
    return m;
}

std::uint64_t Mlp::checksum() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t d : layer_dims) {
        const auto v = static_cast<std::uint64_t>(d);
        h = fnv1a(&v, sizeof v, h);
    }
    for (std::size_t l = 0; l < weights.size(); ++l) {
        h = fnv1a_doubles(weights[l].a, h);
        h = fnv1a_doubles(biases[l], h);
    }
    return h;
}

double forward(const Mlp& model, std::span<const double> x) {
    if (x.size() != model.input_dim()) {
        throw ValidationError("forward: expected " + std::to_string(model.input_dim()) +
                              " features, got " + std::to_string(x.size()));
    }
    std::vector<double> cur(x.begin(), x.end()), next;
    for (std::size_t l = 0; l < model.n_layers(); ++l) {
        const Matrix& w = model.weights[l];
        next.assign(w.rows, 0.0);
        for (std::size_t j = 0; j < w.rows; ++j) {
            const double* wr = w.a.data() + j * w.cols;
            double acc = model.biases[l][j];
            for (std::size_t k = 0; k < w.cols; ++k) acc += wr[k] * cur[k];
            next[j] = (l + 1 < model.n_layers()) ? std::max(0.0, acc) : acc;
        }
        cur.swap(next);
    }
    return cur[0];
}

void ScalerParams::transform(std::span<const double> x, std::span<double> out) const {
    for (std::size_t i = 0; i < mean.size(); ++i) out[i] = (x[i] - mean[i]) / std[i];
}

void ScalerParams::inverse_transform(std::span<const double> x, std::span<double> out) const {
    for (std::size_t i = 0; i < mean.size(); ++i) out[i] = x[i] * std[i] + mean[i];
}

Matrix ScalerParams::transform(const Matrix& X) const {
    Matrix out(X.rows, X.cols);
    for (std::size_t i = 0; i < X.rows; ++i) transform(X.row(i), out.row(i));
    return out;
}

ScalerParams fit_scaler(const Matrix& X, std::vector<std::string> feature_names) {
    if (X.rows == 0) throw ValidationError("fit_scaler: empty dataset");
    if (!feature_names.empty() && feature_names.size() != X.cols) {
        throw ValidationError("fit_scaler: feature name count does not match columns");
    }
    ScalerParams s;
    s.feature_names = std::move(feature_names);
    s.mean.assign(X.cols, 0.0);
    s.std.assign(X.cols, 0.0);
    for (std::size_t i = 0; i < X.rows; ++i) {
        for (std::size_t j = 0; j < X.cols; ++j) s.mean[j] += X(i, j);
    }
    for (double& m : s.mean) m /= static_cast<double>(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i) {
        for (std::size_t j = 0; j < X.cols; ++j) {
            const double d = X(i, j) - s.mean[j];
            s.std[j] += d * d;
        }
    }
    for (std::size_t j = 0; j < X.cols; ++j) {
        const double var = s.std[j] / static_cast<double>(X.rows);
        if (var == 0.0) {
            const std::string name = s.feature_names.empty() ? std::to_string(j) : s.feature_names[j];
            throw ValidationError("fit_scaler: constant feature '" + name + "'");
        }
        s.std[j] = std::sqrt(var);
    }
    return s;
}

void HyperParams::validate() const {
    if (n_hidden_layers < 1 || neurons_per_layer < 1 || minibatch_size < 1 || epochs < 0) {
        throw ValidationError("hyperparams: counts must be >= 1 (epochs >= 0)");
    }
    if (alpha_l2 < 0.0 || !(learning_rate > 0.0)) {
        throw ValidationError("hyperparams: need alpha_l2 >= 0 and learning_rate > 0");
    }
}

std::vector<std::size_t> HyperParams::layer_dims(std::size_t input_dim) const {
    std::vector<std::size_t> dims{input_dim};
    dims.insert(dims.end(), static_cast<std::size_t>(n_hidden_layers),
                static_cast<std::size_t>(neurons_per_layer));
    dims.push_back(1);
    return dims;
}

Gradients Gradients::zeros_like(const Mlp& model) {
    Gradients g;
    for (std::size_t l = 0; l < model.n_layers(); ++l) {
        g.dW.emplace_back(model.weights[l].rows, model.weights[l].cols);
        g.db.emplace_back(model.biases[l].size(), 0.0);
    }
    return g;
}

namespace {

double weight_penalty(const Mlp& model, double alpha_l2) {
    if (alpha_l2 == 0.0) return 0.0;
    double ss = 0.0;
    for (const Matrix& w : model.weights) {
        for (double v : w.a) ss += v * v;
    }
    return 0.5 * alpha_l2 * ss;
}

} // namespace

double cost(const Mlp& model, const Matrix& X, std::span<const double> y, double alpha_l2,
            std::span<const double> sample_weights) {
    if (X.rows == 0) throw ValidationError("cost: empty batch");
    if (y.size() != X.rows) throw ValidationError("cost: target count mismatch");
    if (!sample_weights.empty() && sample_weights.size() != X.rows) {
        throw ValidationError("cost: sample weight count mismatch");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < X.rows; ++i) {
        const double r = forward(model, X.row(i)) - y[i];
        const double w = sample_weights.empty() ? 1.0 : sample_weights[i];
        acc += w * r * r;
    }
    return acc / (2.0 * static_cast<double>(X.rows)) + weight_penalty(model, alpha_l2);
}

double backprop(const Mlp& model, const Matrix& X, std::span<const double> y, double alpha_l2,
                Gradients& out, std::span<const double> sample_weights) {
    if (X.rows == 0) throw ValidationError("backprop: empty batch");
    if (y.size() != X.rows) throw ValidationError("backprop: target count mismatch");
    if (X.cols != model.input_dim()) throw ValidationError("backprop: feature dimension mismatch");
    if (!sample_weights.empty() && sample_weights.size() != X.rows) {
        throw ValidationError("backprop: sample weight count mismatch");
    }
    const std::size_t n_layers = model.n_layers();
    for (std::size_t l = 0; l < n_layers; ++l) {
        out.dW[l].fill(0.0);
        std::fill(out.db[l].begin(), out.db[l].end(), 0.0);
    }

    // activations per layer for one sample; act[0] is the input
    std::vector<std::vector<double>> act(n_layers + 1);
    std::vector<std::vector<double>> delta(n_layers);
    for (std::size_t l = 0; l <= n_layers; ++l) act[l].assign(model.layer_dims[l], 0.0);
    for (std::size_t l = 0; l < n_layers; ++l) delta[l].assign(model.layer_dims[l + 1], 0.0);

    const double m = static_cast<double>(X.rows);
    double sq_acc = 0.0;

    for (std::size_t s = 0; s < X.rows; ++s) {
        const auto x = X.row(s);
        std::copy(x.begin(), x.end(), act[0].begin());
        for (std::size_t l = 0; l < n_layers; ++l) {
            const Matrix& w = model.weights[l];
            for (std::size_t j = 0; j < w.rows; ++j) {
                const double* wr = w.a.data() + j * w.cols;
                double acc = model.biases[l][j];
                for (std::size_t k = 0; k < w.cols; ++k) acc += wr[k] * act[l][k];
                act[l + 1][j] = (l + 1 < n_layers) ? std::max(0.0, acc) : acc;
            }
        }
        const double r = act[n_layers][0] - y[s];
        const double wgt = sample_weights.empty() ? 1.0 : sample_weights[s];
        sq_acc += wgt * r * r;
        delta[n_layers - 1][0] = wgt * r / m;

        for (std::size_t l = n_layers; l-- > 0;) {
            const Matrix& w = model.weights[l];
            Matrix& dw = out.dW[l];
            for (std::size_t j = 0; j < w.rows; ++j) {
                const double dj = delta[l][j];
                if (dj == 0.0) continue;
                double* dwr = dw.a.data() + j * w.cols;
                const double* al = act[l].data();
                for (std::size_t k = 0; k < w.cols; ++k) dwr[k] += dj * al[k];
                out.db[l][j] += dj;
            }
            if (l == 0) continue;
            auto& dprev = delta[l - 1];
            std::fill(dprev.begin(), dprev.end(), 0.0);
            for (std::size_t j = 0; j < w.rows; ++j) {
                const double dj = delta[l][j];
                if (dj == 0.0) continue;
                const double* wr = w.a.data() + j * w.cols;
                for (std::size_t k = 0; k < w.cols; ++k) dprev[k] += wr[k] * dj;
            }
            // ReLU subgradient: 0 where the activation was clipped (or exactly 0)
            for (std::size_t k = 0; k < dprev.size(); ++k) {
                if (act[l][k] <= 0.0) dprev[k] = 0.0;
            }
        }
    }

    if (alpha_l2 != 0.0) {
        for (std::size_t l = 0; l < n_layers; ++l) {
            const Matrix& w = model.weights[l];
            Matrix& dw = out.dW[l];
            for (std::size_t i = 0; i < w.a.size(); ++i) dw.a[i] += alpha_l2 * w.a[i];
        }
    }
    return sq_acc / (2.0 * m) + weight_penalty(model, alpha_l2);
}

AdamState AdamState::zeros_like(const Mlp& model) {
    AdamState s;
    for (std::size_t l = 0; l < model.n_layers(); ++l) {
        s.mW.emplace_back(model.weights[l].rows, model.weights[l].cols);
        s.vW.emplace_back(model.weights[l].rows, model.weights[l].cols);
        s.mb.emplace_back(model.biases[l].size(), 0.0);
        s.vb.emplace_back(model.biases[l].size(), 0.0);
    }
    return s;
}

void adam_step(Mlp& model, const Gradients& g, AdamState& state, long long t,
               const HyperParams& hp) {
    if (t < 1) throw ValidationError("adam_step: step index must be >= 1");
    const double b1 = hp.adam_beta1, b2 = hp.adam_beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
    auto update = [&](double& theta, double grad, double& m, double& v) {
        m = b1 * m + (1.0 - b1) * grad;
        v = b2 * v + (1.0 - b2) * grad * grad;
        theta -= hp.learning_rate * (m / c1) / (std::sqrt(v / c2) + hp.adam_eps);
    };
    for (std::size_t l = 0; l < model.n_layers(); ++l) {
        Matrix& w = model.weights[l];
        for (std::size_t i = 0; i < w.a.size(); ++i) {
            update(w.a[i], g.dW[l].a[i], state.mW[l].a[i], state.vW[l].a[i]);
        }
        for (std::size_t j = 0; j < model.biases[l].size(); ++j) {
            update(model.biases[l][j], g.db[l][j], state.mb[l][j], state.vb[l][j]);
        }
    }
}

namespace {

struct TargetScale {
    double mean = 0.0;
    double std = 1.0;
};

TargetScale fit_target_scale(std::span<const double> y) {
    TargetScale t;
    for (double v : y) t.mean += v;
    t.mean /= static_cast<double>(y.size());
    double var = 0.0;
    for (double v : y) var += (v - t.mean) * (v - t.mean);
    var /= static_cast<double>(y.size());
    t.std = var > 0.0 ? std::sqrt(var) : 1.0;
    return t;
}

} // namespace

TrainResult train(const Matrix& X_train, std::span<const double> y_train, const Matrix& X_val,
                  std::span<const double> y_val, std::vector<std::string> feature_names,
                  const HyperParams& hp, std::span<const double> sample_weights) {
    hp.validate();
    if (X_train.rows == 0) throw ValidationError("train: empty training set");
    if (y_train.size() != X_train.rows || y_val.size() != X_val.rows) {
        throw ValidationError("train: target count mismatch");
    }
    if (!sample_weights.empty() && sample_weights.size() != X_train.rows) {
        throw ValidationError("train: sample weight count mismatch");
    }

    TrainResult res;
    res.scaler = fit_scaler(X_train, std::move(feature_names));
    const Matrix Xs = res.scaler.transform(X_train);
    const Matrix Xvs = X_val.rows > 0 ? res.scaler.transform(X_val) : Matrix{};

    const TargetScale ts = fit_target_scale(y_train);
    std::vector<double> ys(y_train.size());
    for (std::size_t i = 0; i < ys.size(); ++i) ys[i] = (y_train[i] - ts.mean) / ts.std;

    std::vector<double> weights;
    if (!sample_weights.empty()) {
        weights.assign(sample_weights.begin(), sample_weights.end());
        const double mean = std::accumulate(weights.begin(), weights.end(), 0.0) /
                            static_cast<double>(weights.size());
        if (!(mean > 0.0)) throw ValidationError("train: sample weights must have positive mean");
        for (double& w : weights) w /= mean;
    }

    Rng rng(hp.rng_seed);
    res.model = Mlp::init(hp.layer_dims(X_train.cols), rng);
    AdamState adam = AdamState::zeros_like(res.model);
    Gradients grads = Gradients::zeros_like(res.model);

    std::vector<std::size_t> order(X_train.rows);
    std::iota(order.begin(), order.end(), 0);

    const auto batch_size = static_cast<std::size_t>(hp.minibatch_size);
    Matrix Xb;
    std::vector<double> yb, wb;
    long long step = 0;

    const std::span<const double> weight_span =
        weights.empty() ? std::span<const double>{} : std::span<const double>(weights);

    for (int epoch = 0; epoch < hp.epochs && !res.report.diverged; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        rng.shuffle(order);
        std::size_t n_batches = 0;
        for (std::size_t start = 0; start < order.size(); start += batch_size) {
            const std::size_t nb = std::min(batch_size, order.size() - start);
            Xb = Matrix(nb, Xs.cols);
            yb.resize(nb);
            wb.resize(weights.empty() ? 0 : nb);
            for (std::size_t i = 0; i < nb; ++i) {
                const std::size_t src = order[start + i];
                std::copy(Xs.row(src).begin(), Xs.row(src).end(), Xb.row(i).begin());
                yb[i] = ys[src];
                if (!weights.empty()) wb[i] = weights[src];
            }
            const double j = backprop(res.model, Xb, yb, hp.alpha_l2, grads,
                                      weights.empty() ? std::span<const double>{} : wb);
            if (!std::isfinite(j)) {
                res.report.diverged = true;
                break;
            }
            adam_step(res.model, grads, adam, ++step, hp);
            ++n_batches;
        }
        if (n_batches == 0) break;
        res.report.train_cost.push_back(cost(res.model, Xs, ys, hp.alpha_l2, weight_span));

        double mae = 0.0, mae_std = 0.0;
        if (Xvs.rows > 0) {
            std::vector<double> abs_err(Xvs.rows);
            for (std::size_t i = 0; i < Xvs.rows; ++i) {
                const double pred = forward(res.model, Xvs.row(i)) * ts.std + ts.mean;
                abs_err[i] = std::abs(pred - y_val[i]);
                mae += abs_err[i];
            }
            mae /= static_cast<double>(Xvs.rows);
            for (double e : abs_err) mae_std += (e - mae) * (e - mae);
            mae_std = std::sqrt(mae_std / static_cast<double>(Xvs.rows));
        }
        res.report.val_mae.push_back(mae);
        res.report.val_mae_std.push_back(mae_std);
        res.report.epoch_ms.push_back(
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count());
    }

    // fold the target de-standardization into the output layer so the model
    // maps standardized features directly to the label unit
    Matrix& w_out = res.model.weights.back();
    for (double& v : w_out.a) v *= ts.std;
    res.model.biases.back()[0] = res.model.biases.back()[0] * ts.std + ts.mean;

    res.report.weights_checksum = res.model.checksum();
    return res;
}

namespace {

constexpr int kModelVersion = 1;
constexpr const char* kModelFormat = "regencool-model";

std::uint64_t model_file_checksum(const Mlp& model, const ScalerParams& scaler) {
    std::uint64_t h = model.checksum();
    h = fnv1a_doubles(scaler.mean, h);
    h = fnv1a_doubles(scaler.std, h);
    for (const auto& name : scaler.feature_names) h = fnv1a(name.data(), name.size(), h);
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace

void save_model(const Mlp& model, const ScalerParams& scaler, const std::filesystem::path& path) {
    model.validate();
    nlohmann::json j;
    j["format"] = kModelFormat;
    j["version"] = kModelVersion;
    j["feature_names"] = scaler.feature_names;
    j["scaler_mean"] = scaler.mean;
    j["scaler_std"] = scaler.std;
    j["layer_dims"] = model.layer_dims;
    nlohmann::json weights = nlohmann::json::array();
    nlohmann::json biases = nlohmann::json::array();
    for (std::size_t l = 0; l < model.n_layers(); ++l) {
        weights.push_back(model.weights[l].a); // row-major
        biases.push_back(model.biases[l]);
    }
    j["weights"] = std::move(weights);
    j["biases"] = std::move(biases);
    j["checksum"] = hex64(model_file_checksum(model, scaler));

    std::ofstream out(path);
    if (!out) throw IoError("save_model: cannot open " + path.string() + " for writing");
    out << j.dump(1) << "\n";
    if (!out) throw IoError("save_model: write failed for " + path.string());
}

std::pair<Mlp, ScalerParams> load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_model: cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("load_model: " + path.string() + ": " + e.what());
    }
    try {
        if (j.value("format", "") != kModelFormat) {
            throw ValidationError("load_model: not a model file: " + path.string());
        }
        if (j.at("version").get<int>() != kModelVersion) {
            throw ValidationError("load_model: unsupported model version " +
                                  j.at("version").dump() + " in " + path.string());
        }
        Mlp model;
        ScalerParams scaler;
        j.at("feature_names").get_to(scaler.feature_names);
        j.at("scaler_mean").get_to(scaler.mean);
        j.at("scaler_std").get_to(scaler.std);
        j.at("layer_dims").get_to(model.layer_dims);
        const auto& weights = j.at("weights");
        const auto& biases = j.at("biases");
        for (std::size_t l = 0; l + 1 < model.layer_dims.size(); ++l) {
            Matrix w(model.layer_dims[l + 1], model.layer_dims[l]);
            const auto flat = weights.at(l).get<std::vector<double>>();
            if (flat.size() != w.a.size()) {
                throw ValidationError("load_model: weight size mismatch at layer " +
                                      std::to_string(l));
            }
            w.a = flat;
            model.weights.push_back(std::move(w));
            model.biases.push_back(biases.at(l).get<std::vector<double>>());
        }
        model.validate();
        if (scaler.mean.size() != model.input_dim() || scaler.std.size() != model.input_dim()) {
            throw ValidationError("load_model: scaler dimension mismatch");
        }
        const std::string expect = hex64(model_file_checksum(model, scaler));
        if (j.at("checksum").get<std::string>() != expect) {
            throw ValidationError("load_model: checksum mismatch in " + path.string());
        }
        return {std::move(model), std::move(scaler)};
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("load_model: " + path.string() + ": " + e.what());
    }
}

} // namespace regencool
