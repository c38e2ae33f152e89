#include "regencool/kde.hpp"

#include <algorithm>
#include <cmath>

#include "regencool/errors.hpp"

namespace regencool {

namespace {

// mean kernel density at x over the standardized rows of pts
double density(const Matrix& pts, std::span<const double> x, double bandwidth) {
    const double inv_h2 = 1.0 / (2.0 * bandwidth * bandwidth);
    double acc = 0.0;
    for (std::size_t i = 0; i < pts.rows; ++i) {
        const auto row = pts.row(i);
        double d2 = 0.0;
        for (std::size_t j = 0; j < pts.cols; ++j) {
            const double d = row[j] - x[j];
            d2 += d * d;
        }
        acc += std::exp(-d2 * inv_h2);
    }
    // the (2 pi h^2)^(-d/2) normalization cancels in the ratio only when both
    // sets share a bandwidth, so keep it explicit
    const double norm = std::pow(2.0 * std::numbers::pi * bandwidth * bandwidth,
                                 -0.5 * static_cast<double>(pts.cols));
    return acc * norm / static_cast<double>(pts.rows);
}

} // namespace

std::vector<double> kde_importance_weights(const Matrix& train_features,
                                           const Matrix& target_features,
                                           std::optional<double> bandwidth) {
    if (train_features.rows < 2 || target_features.rows < 1) {
        throw ValidationError("kde_importance_weights: need >= 2 train and >= 1 target samples");
    }
    if (train_features.cols != target_features.cols) {
        throw ValidationError("kde_importance_weights: feature dimension mismatch");
    }
    // standardize both sets with the training statistics; a zero-variance
    // direction makes the bandwidth degenerate
    ScalerParams scaler;
    try {
        scaler = fit_scaler(train_features, {});
    } catch (const ValidationError&) {
        throw ValidationError("kde_importance_weights: degenerate bandwidth (constant feature)");
    }
    const Matrix train_std = scaler.transform(train_features);
    const Matrix target_std = scaler.transform(target_features);

    const auto d = static_cast<double>(train_features.cols);
    const double h_train =
        bandwidth.value_or(std::pow(static_cast<double>(train_std.rows), -1.0 / (d + 4.0)));
    const double h_target =
        bandwidth.value_or(std::pow(static_cast<double>(target_std.rows), -1.0 / (d + 4.0)));

    std::vector<double> w(train_std.rows);
    for (std::size_t i = 0; i < train_std.rows; ++i) {
        const double p_train = density(train_std, train_std.row(i), h_train);
        const double p_target = density(target_std, train_std.row(i), h_target);
        w[i] = std::clamp(p_target / p_train, 0.1, 10.0);
    }
    double mean = 0.0;
    for (double v : w) mean += v;
    mean /= static_cast<double>(w.size());
    for (double& v : w) v /= mean;
    return w;
}

} // namespace regencool
