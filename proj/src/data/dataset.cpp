#include "qts/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace qts::data {

NormParams fit_normalization(const RawSeries& series, NormMode mode, std::size_t fit_rows) {
    const std::size_t C = series.channels();
    const std::size_t rows = std::min(fit_rows, series.rows());
    NormParams p;
    p.mode = mode;
    p.lo_or_mu.assign(C, 0.0);
    p.range_or_sigma.assign(C, 0.0);
    for (std::size_t c = 0; c < C; ++c) {
        double lo = 0.0, hi = 0.0, sum = 0.0, sum2 = 0.0;
        std::size_t count = 0;
        for (std::size_t r = 0; r < rows; ++r) {
            if (!series.mask[r * C + c]) continue;
            const double v = series.values.at(r, c);
            if (count == 0) {
                lo = hi = v;
            } else {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            sum += v;
            sum2 += v * v;
            count += 1;
        }
        if (count == 0) throw std::invalid_argument("fit_normalization: empty fit range");
        if (mode == NormMode::MinMax01) {
            if (hi - lo <= 0.0)
                throw std::invalid_argument("fit_normalization: constant channel in min-max mode");
            p.lo_or_mu[c] = lo;
            p.range_or_sigma[c] = hi - lo;
        } else {
            const double mu = sum / static_cast<double>(count);
            const double var = sum2 / static_cast<double>(count) - mu * mu;
            if (var <= 0.0)
                throw std::invalid_argument("fit_normalization: constant channel");
            p.lo_or_mu[c] = mu;
            p.range_or_sigma[c] = std::sqrt(var);
        }
    }
    return p;
}

diff::Tensor Dataset::input(std::size_t window) const {
    const WindowRef& w = windows.at(window);
    const diff::Tensor& seg = segments[w.segment];
    const std::size_t T = static_cast<std::size_t>(lookback);
    diff::Tensor x(T, seg.cols);
    for (std::size_t r = 0; r < T; ++r)
        for (std::size_t c = 0; c < seg.cols; ++c) x.at(r, c) = seg.at(w.start + r, c);
    return x;
}

diff::Tensor Dataset::target(std::size_t window) const {
    const WindowRef& w = windows.at(window);
    const diff::Tensor& seg = segments[w.segment];
    const std::size_t T = static_cast<std::size_t>(lookback);
    const std::size_t S = static_cast<std::size_t>(horizon);
    if (target_channel >= 0) {
        diff::Tensor y(S, 1);
        for (std::size_t r = 0; r < S; ++r)
            y.at(r, 0) = seg.at(w.start + T + r, static_cast<std::size_t>(target_channel));
        return y;
    }
    diff::Tensor y(S, seg.cols);
    for (std::size_t r = 0; r < S; ++r)
        for (std::size_t c = 0; c < seg.cols; ++c) y.at(r, c) = seg.at(w.start + T + r, c);
    return y;
}

Dataset make_windows(std::vector<diff::Tensor> segments, std::vector<std::string> channel_names,
                     int lookback, int horizon, int target_channel, double split_frac) {
    if (lookback < 1 || horizon < 1)
        throw std::invalid_argument("make_windows: lookback and horizon must be >= 1");
    if (split_frac <= 0.0 || split_frac >= 1.0)
        throw std::invalid_argument("make_windows: split fraction must be in (0, 1)");
    if (target_channel >= static_cast<int>(channel_names.size()))
        throw std::invalid_argument("make_windows: target channel out of range");
    Dataset ds;
    ds.channel_names = std::move(channel_names);
    ds.segments = std::move(segments);
    ds.lookback = lookback;
    ds.horizon = horizon;
    ds.target_channel = target_channel;
    const std::size_t span = static_cast<std::size_t>(lookback + horizon);
    for (std::size_t s = 0; s < ds.segments.size(); ++s) {
        const std::size_t len = ds.segments[s].rows;
        if (len < span) continue;
        for (std::size_t start = 0; start + span <= len; ++start)
            ds.windows.push_back(WindowRef{s, start});
    }
    if (ds.windows.empty()) throw std::invalid_argument("make_windows: no valid windows");
    ds.train_count =
        static_cast<std::size_t>(split_frac * static_cast<double>(ds.windows.size()));
    if (ds.train_count == 0 || ds.train_count == ds.windows.size())
        throw std::invalid_argument("make_windows: degenerate split");
    return ds;
}

Dataset build_dataset(const RawSeries& series, const DatasetSpec& spec) {
    const std::size_t C = series.channels();
    // Split into maximal runs of fully valid rows.
    std::vector<std::pair<std::size_t, std::size_t>> runs;  // [begin, end)
    std::size_t r = 0;
    while (r < series.rows()) {
        if (!series.row_valid(r)) {
            ++r;
            continue;
        }
        std::size_t begin = r;
        while (r < series.rows() && series.row_valid(r)) ++r;
        runs.emplace_back(begin, r);
    }
    if (runs.empty()) throw std::invalid_argument("build_dataset: no valid rows");

    // Enumerate windows over raw runs to locate the chronological split, then
    // fit normalization on exactly the rows training windows touch.
    const std::size_t span = static_cast<std::size_t>(spec.lookback + spec.horizon);
    std::size_t total_windows = 0;
    for (const auto& [b, e] : runs)
        if (e - b >= span) total_windows += (e - b) - span + 1;
    if (total_windows == 0) throw std::invalid_argument("build_dataset: no valid windows");
    std::size_t train_count =
        static_cast<std::size_t>(spec.split_frac * static_cast<double>(total_windows));
    if (train_count == 0 || train_count == total_windows)
        throw std::invalid_argument("build_dataset: degenerate split");

    std::size_t fit_rows_end = 0;  // absolute row index (exclusive)
    {
        std::size_t remaining = train_count;
        for (const auto& [b, e] : runs) {
            if (e - b < span) continue;
            const std::size_t here = (e - b) - span + 1;
            if (remaining > here) {
                remaining -= here;
                fit_rows_end = e;
            } else {
                fit_rows_end = b + (remaining - 1) + span;
                break;
            }
        }
    }

    const NormParams norm = fit_normalization(series, spec.mode, fit_rows_end);

    std::size_t clamped = 0;
    std::vector<diff::Tensor> segments;
    for (const auto& [b, e] : runs) {
        diff::Tensor seg(e - b, C);
        for (std::size_t row = b; row < e; ++row)
            for (std::size_t c = 0; c < C; ++c) {
                double v = norm.normalize(series.values.at(row, c), c);
                if (spec.mode == NormMode::MinMax01 && (v < 0.0 || v > 1.0)) {
                    v = std::clamp(v, 0.0, 1.0);
                    ++clamped;
                }
                seg.at(row - b, c) = v;
            }
        segments.push_back(std::move(seg));
    }

    Dataset ds = make_windows(std::move(segments), series.channel_names, spec.lookback,
                              spec.horizon, spec.target_channel, spec.split_frac);
    ds.norm = norm;
    ds.clamped_values = clamped;
    return ds;
}

std::string dataset_to_json(const Dataset& ds) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["channel_names"] = ds.channel_names;
    j["lookback"] = ds.lookback;
    j["horizon"] = ds.horizon;
    j["target_channel"] = ds.target_channel;
    j["train_count"] = ds.train_count;
    j["clamped_values"] = ds.clamped_values;
    j["norm"]["mode"] = ds.norm.mode == NormMode::MinMax01 ? "minmax" : "standardize";
    j["norm"]["lo_or_mu"] = ds.norm.lo_or_mu;
    j["norm"]["range_or_sigma"] = ds.norm.range_or_sigma;
    nlohmann::json segs = nlohmann::json::array();
    for (const diff::Tensor& s : ds.segments) {
        nlohmann::json seg;
        seg["rows"] = s.rows;
        seg["cols"] = s.cols;
        seg["data"] = s.data;
        segs.push_back(std::move(seg));
    }
    j["segments"] = std::move(segs);
    return j.dump();
}

Dataset dataset_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    std::vector<diff::Tensor> segments;
    for (const auto& seg : j.at("segments")) {
        segments.push_back(diff::Tensor::from_rows(seg.at("rows").get<std::size_t>(),
                                                   seg.at("cols").get<std::size_t>(),
                                                   seg.at("data").get<std::vector<double>>()));
    }
    Dataset ds = make_windows(
        std::move(segments), j.at("channel_names").get<std::vector<std::string>>(),
        j.at("lookback").get<int>(), j.at("horizon").get<int>(), j.at("target_channel").get<int>(),
        0.5);
    ds.train_count = j.at("train_count").get<std::size_t>();
    ds.clamped_values = j.at("clamped_values").get<std::size_t>();
    ds.norm.mode =
        j.at("norm").at("mode").get<std::string>() == "minmax" ? NormMode::MinMax01
                                                               : NormMode::Standardize;
    ds.norm.lo_or_mu = j.at("norm").at("lo_or_mu").get<std::vector<double>>();
    ds.norm.range_or_sigma = j.at("norm").at("range_or_sigma").get<std::vector<double>>();
    return ds;
}

}  // namespace qts::data
