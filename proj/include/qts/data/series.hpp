#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qts/diff/tensor.hpp"

namespace qts::data {

/// Equidistant multivariate series. Rows with any invalid cell act as
/// exclusion boundaries when windows are built.
struct RawSeries {
    std::vector<std::string> channel_names;
    diff::Tensor values;             // N x C
    std::vector<std::uint8_t> mask;  // N x C, 1 = valid

    std::size_t rows() const { return values.rows; }
    std::size_t channels() const { return values.cols; }

    bool row_valid(std::size_t r) const {
        for (std::size_t c = 0; c < values.cols; ++c)
            if (!mask[r * values.cols + c]) return false;
        return true;
    }

    static RawSeries dense(std::vector<std::string> names, diff::Tensor values) {
        RawSeries s;
        s.channel_names = std::move(names);
        s.mask.assign(values.size(), 1);
        s.values = std::move(values);
        return s;
    }
};

}  // namespace qts::data
