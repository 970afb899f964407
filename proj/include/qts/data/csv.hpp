#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qts/data/series.hpp"

namespace qts::data {

/// Reads a comma-separated file: header row of channel names, one numeric
/// row per sample, empty cell = missing. A leading "timestamp"/"time"
/// column is dropped.
RawSeries read_csv(const std::string& path);

void write_csv(const std::string& path, const RawSeries& series);

struct IngestRules {
    /// Column consulted for shutdown filtering and then dropped. Rows with a
    /// value above shutdown_threshold are excluded.
    std::string operating_state_column = "operating_state";
    double shutdown_threshold = 100.0;
    /// Rows with wind speed above this are excluded.
    std::string wind_speed_column = "wind_speed";
    double max_wind_speed = 25.0;
    /// Channel unwrapped across the 0/360 degree boundary.
    std::string wind_direction_column = "wind_direction";
    /// Missing runs up to this length are linearly interpolated; longer runs
    /// split the series into segments.
    std::size_t max_gap = 8;
};

/// Ingests a CSV against an expected channel schema, applying the filtering,
/// unwrapping and gap-interpolation rules. The returned series keeps exactly
/// the schema channels; rows that remain invalid split the series when
/// windows are built. Throws on unknown columns, non-numeric cells, or an
/// empty result.
RawSeries ingest_csv(const std::string& path, const std::vector<std::string>& schema,
                     const IngestRules& rules = {});

/// Shortest-arc unwrapping of a wrapped angle sequence in degrees; entries
/// with mask 0 are skipped and left untouched.
void unwrap_degrees(std::vector<double>& values, const std::vector<std::uint8_t>& mask);

}  // namespace qts::data
