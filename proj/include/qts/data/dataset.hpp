#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qts/data/series.hpp"

namespace qts::data {

enum class NormMode { MinMax01, Standardize };

/// Per-channel affine normalization fitted on the training range only.
struct NormParams {
    NormMode mode = NormMode::MinMax01;
    std::vector<double> lo_or_mu;
    std::vector<double> range_or_sigma;

    double normalize(double x, std::size_t channel) const {
        return (x - lo_or_mu[channel]) / range_or_sigma[channel];
    }
    double denormalize(double v, std::size_t channel) const {
        return v * range_or_sigma[channel] + lo_or_mu[channel];
    }
};

/// Fits on the first fit_rows valid cells of each channel (chronological,
/// mask-aware). Throws on an empty fit range or a constant channel in
/// min-max mode.
NormParams fit_normalization(const RawSeries& series, NormMode mode, std::size_t fit_rows);

struct WindowRef {
    std::size_t segment;
    std::size_t start;
};

/// Windowed dataset over normalized, gap-free segments. Windows are
/// chronological; the first train_count are the training split.
struct Dataset {
    std::vector<std::string> channel_names;
    std::vector<diff::Tensor> segments;  // normalized rows x C
    NormParams norm;
    int lookback = 0;
    int horizon = 0;
    int target_channel = -1;  // -1 = forecast every channel
    std::vector<WindowRef> windows;
    std::size_t train_count = 0;
    std::size_t clamped_values = 0;  // validation cells clamped to [0, 1]

    std::size_t size() const { return windows.size(); }
    std::size_t validation_count() const { return windows.size() - train_count; }
    std::size_t channels() const { return channel_names.size(); }
    std::size_t output_channels() const { return target_channel >= 0 ? 1 : channels(); }

    diff::Tensor input(std::size_t window) const;   // T x C
    diff::Tensor target(std::size_t window) const;  // S x C, or S x 1 in target mode
};

/// Sliding windows of stride 1 over every segment of length >= T + S, split
/// chronologically at split_frac. Values must already be normalized.
Dataset make_windows(std::vector<diff::Tensor> segments, std::vector<std::string> channel_names,
                     int lookback, int horizon, int target_channel, double split_frac);

struct DatasetSpec {
    int lookback = 5;
    int horizon = 1;
    double split_frac = 0.75;
    NormMode mode = NormMode::MinMax01;
    int target_channel = -1;
};

/// Full pipeline: segment the series on invalid rows, choose the chronological
/// window split, fit normalization on rows touched by training windows only,
/// normalize (clamping min-max validation spill into [0, 1]), and window.
Dataset build_dataset(const RawSeries& series, const DatasetSpec& spec);

/// Portable JSON serialization of segments, normalization and split.
std::string dataset_to_json(const Dataset& ds);
Dataset dataset_from_json(const std::string& text);

}  // namespace qts::data
