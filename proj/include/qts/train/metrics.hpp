#pragma once

#include "qts/diff/tensor.hpp"

namespace qts::train {

/// Mean of squared differences over all elements.
double mse(const diff::Tensor& pred, const diff::Tensor& target);

struct Metrics {
    double mape = 0.0;
    double mae = 0.0;
    double rmse = 0.0;
};

inline constexpr double kMapeEps = 1e-8;

/// MAPE is a fraction (not percent): mean |d| / (|target| + 1e-8).
Metrics metrics(const diff::Tensor& pred, const diff::Tensor& target);

/// Streaming accumulation across evaluation windows.
struct MetricAccumulator {
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    double ape_sum = 0.0;
    std::size_t count = 0;

    void add(const diff::Tensor& pred, const diff::Tensor& target);
    void merge(const MetricAccumulator& o);
    Metrics finalize() const;
    double mse() const { return count ? sq_sum / static_cast<double>(count) : 0.0; }
};

}  // namespace qts::train
