#pragma once

#include <cstdint>

#include "qts/data/series.hpp"

namespace qts::data {

/// Channel names of the wind-farm CSV schema; the last one is the usual
/// forecasting target.
const std::vector<std::string>& surrogate_schema();

/// Deterministic synthetic stand-in with seven correlated channels at a
/// 15-minute cadence: demand with a daily cycle, a mean-reverting wind-speed
/// walk, a slowly drifting direction (emitted wrapped to [0, 360)), a power
/// curve, and a curtailment setpoint driven by smoothed production. Values
/// are plausible in scale only; they are never compared to real-site results.
RawSeries surrogate_series(std::size_t n_points, std::uint64_t seed);

}  // namespace qts::data
