#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "regencool/rng.hpp"

namespace regencool {

// Dense row-major matrix, sized once and mutated in place.
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
    std::span<const double> row(std::size_t i) const { return {a.data() + i * cols, cols}; }
    std::span<double> row(std::size_t i) { return {a.data() + i * cols, cols}; }
    void fill(double v) { std::fill(a.begin(), a.end(), v); }
};

// Fully connected feedforward network: ReLU on hidden layers, identity on the
// scalar output. weights[l] has shape (layer_dims[l+1] x layer_dims[l]).
struct Mlp {
    std::vector<std::size_t> layer_dims;
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;

    std::size_t input_dim() const { return layer_dims.empty() ? 0 : layer_dims.front(); }
    std::size_t n_layers() const { return weights.size(); }

    void validate() const;

    // Glorot-uniform init: w ~ U(+-sqrt(6/(fan_in+fan_out))), biases zero.
    static Mlp init(const std::vector<std::size_t>& layer_dims, Rng& rng);

    std::uint64_t checksum() const;
};

// Scalar forward pass; x.size() must equal input_dim().
double forward(const Mlp& model, std::span<const double> x);

// Per-feature standardization statistics (population std).
struct ScalerParams {
    std::vector<double> mean;
    std::vector<double> std;
    std::vector<std::string> feature_names;

    std::size_t dim() const { return mean.size(); }
    void transform(std::span<const double> x, std::span<double> out) const;
    void inverse_transform(std::span<const double> x, std::span<double> out) const;
    Matrix transform(const Matrix& X) const;
};

ScalerParams fit_scaler(const Matrix& X, std::vector<std::string> feature_names);

struct HyperParams {
    int n_hidden_layers = 3;
    int neurons_per_layer = 128;
    double alpha_l2 = 1e-5;
    int minibatch_size = 1024;
    int epochs = 60;
    double learning_rate = 3e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::uint64_t rng_seed = 0;

    void validate() const;
    std::vector<std::size_t> layer_dims(std::size_t input_dim) const;
};

struct TrainReport {
    std::vector<double> train_cost;   // minibatch-averaged regularized cost per epoch
    std::vector<double> val_mae;      // [K]
    std::vector<double> val_mae_std;  // [K]
    std::vector<double> epoch_ms;
    std::uint64_t weights_checksum = 0;
    bool diverged = false;
};

// Gradient of the cost with the same shapes as the model parameters.
struct Gradients {
    std::vector<Matrix> dW;
    std::vector<std::vector<double>> db;

    static Gradients zeros_like(const Mlp& model);
};

// Regularized cost: J~ = 1/(2m) sum w_i (y_i - f(x_i))^2 + alpha/2 sum W^2.
// Biases are excluded from the penalty; optional per-sample weights are used
// as given (train() normalizes them to mean 1 before calling).
double cost(const Mlp& model, const Matrix& X, std::span<const double> y, double alpha_l2,
            std::span<const double> sample_weights = {});

// Exact gradient by backpropagation; returns the batch cost. The ReLU
// subgradient at 0 is taken as 0.
double backprop(const Mlp& model, const Matrix& X, std::span<const double> y, double alpha_l2,
                Gradients& out, std::span<const double> sample_weights = {});

struct AdamState {
    std::vector<Matrix> mW, vW;
    std::vector<std::vector<double>> mb, vb;

    static AdamState zeros_like(const Mlp& model);
};

// One bias-corrected ADAM update; t is the 1-based step index.
void adam_step(Mlp& model, const Gradients& g, AdamState& state, long long t,
               const HyperParams& hp);

struct TrainResult {
    Mlp model;
    ScalerParams scaler;
    TrainReport report;
};

// Minibatch ADAM on standardized features and targets; the target
// de-standardization is folded back into the output layer, so the returned
// model maps scaler-transformed features straight to the label unit.
// Deterministic for a fixed seed. Throws DivergenceError on non-finite cost.
TrainResult train(const Matrix& X_train, std::span<const double> y_train, const Matrix& X_val,
                  std::span<const double> y_val, std::vector<std::string> feature_names,
                  const HyperParams& hp, std::span<const double> sample_weights = {});

// Versioned JSON model file with a content checksum over all parameters.
void save_model(const Mlp& model, const ScalerParams& scaler, const std::filesystem::path& path);
std::pair<Mlp, ScalerParams> load_model(const std::filesystem::path& path);

} // namespace regencool
