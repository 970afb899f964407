#include "qts/data/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qts::data {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

bool is_timestamp_name(const std::string& name) {
    const std::string n = lower(name);
    return n == "timestamp" || n == "time" || n == "date" || n == "datetime";
}

double parse_cell(const std::string& cell, std::size_t line_no) {
    std::size_t consumed = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &consumed);
    } catch (const std::exception&) {
        throw std::runtime_error("csv: non-numeric cell '" + cell + "' on line " +
                                 std::to_string(line_no));
    }
    if (consumed != cell.size())
        throw std::runtime_error("csv: non-numeric cell '" + cell + "' on line " +
                                 std::to_string(line_no));
    return v;
}

}  // namespace

RawSeries read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: empty file " + path);
    std::vector<std::string> header = split_line(line);
    std::size_t first_col = 0;
    if (!header.empty() && is_timestamp_name(header[0])) first_col = 1;
    if (header.size() <= first_col) throw std::runtime_error("csv: no data columns");

    RawSeries s;
    s.channel_names.assign(header.begin() + static_cast<long>(first_col), header.end());
    const std::size_t C = s.channel_names.size();
    std::vector<double> values;
    std::vector<std::uint8_t> mask;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error("csv: wrong cell count on line " + std::to_string(line_no));
        for (std::size_t c = first_col; c < cells.size(); ++c) {
            if (cells[c].empty()) {
                values.push_back(0.0);
                mask.push_back(0);
            } else {
                values.push_back(parse_cell(cells[c], line_no));
                mask.push_back(1);
            }
        }
    }
    const std::size_t n = values.size() / C;
    s.values = diff::Tensor::from_rows(n, C, std::move(values));
    s.mask = std::move(mask);
    return s;
}

void write_csv(const std::string& path, const RawSeries& series) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("csv: cannot write " + path);
    for (std::size_t c = 0; c < series.channel_names.size(); ++c) {
        if (c) out << ',';
        out << series.channel_names[c];
    }
    out << '\n';
    out.precision(17);
    for (std::size_t r = 0; r < series.rows(); ++r) {
        for (std::size_t c = 0; c < series.channels(); ++c) {
            if (c) out << ',';
            if (series.mask[r * series.channels() + c]) out << series.values.at(r, c);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("csv: write failed for " + path);
}

void unwrap_degrees(std::vector<double>& values, const std::vector<std::uint8_t>& mask) {
    bool seen = false;
    double prev_raw = 0.0, prev_unwrapped = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!mask[i]) continue;
        if (!seen) {
            seen = true;
            prev_raw = values[i];
            prev_unwrapped = values[i];
            continue;
        }
        double delta = values[i] - prev_raw;
        delta -= 360.0 * std::round(delta / 360.0);
        prev_raw = values[i];
        prev_unwrapped += delta;
        values[i] = prev_unwrapped;
    }
}

RawSeries ingest_csv(const std::string& path, const std::vector<std::string>& schema,
                     const IngestRules& rules) {
    const RawSeries raw = read_csv(path);
    const std::size_t C_in = raw.channels();

    // Every file column must be a schema channel or the operating-state
    // filter column (the timestamp was already dropped by read_csv).
    std::vector<int> schema_pos(C_in, -1);
    int op_col = -1;
    for (std::size_t c = 0; c < C_in; ++c) {
        const std::string& name = raw.channel_names[c];
        if (name == rules.operating_state_column) {
            op_col = static_cast<int>(c);
            continue;
        }
        const auto it = std::find(schema.begin(), schema.end(), name);
        if (it == schema.end()) throw std::runtime_error("csv: unknown column '" + name + "'");
        schema_pos[c] = static_cast<int>(it - schema.begin());
    }
    for (const std::string& want : schema) {
        if (std::find(raw.channel_names.begin(), raw.channel_names.end(), want) ==
            raw.channel_names.end())
            throw std::runtime_error("csv: missing schema column '" + want + "'");
    }

    const std::size_t C = schema.size();
    const std::size_t N = raw.rows();
    RawSeries out;
    out.channel_names = schema;
    out.values = diff::Tensor(N, C);
    out.mask.assign(N * C, 0);
    for (std::size_t r = 0; r < N; ++r)
        for (std::size_t c = 0; c < C_in; ++c) {
            if (schema_pos[c] < 0) continue;
            const std::size_t oc = static_cast<std::size_t>(schema_pos[c]);
            out.values.at(r, oc) = raw.values.at(r, c);
            out.mask[r * C + oc] = raw.mask[r * C_in + c];
        }

    // Row-level exclusions: turbine shutdown and implausible wind speed.
    auto exclude_row = [&](std::size_t r) {
        for (std::size_t c = 0; c < C; ++c) out.mask[r * C + c] = 0;
    };
    for (std::size_t r = 0; r < N; ++r) {
        if (op_col >= 0) {
            const std::size_t oc = static_cast<std::size_t>(op_col);
            if (raw.mask[r * C_in + oc] &&
                raw.values.at(r, oc) > rules.shutdown_threshold) {
                exclude_row(r);
                continue;
            }
        }
        const auto ws = std::find(schema.begin(), schema.end(), rules.wind_speed_column);
        if (ws != schema.end()) {
            const std::size_t wc = static_cast<std::size_t>(ws - schema.begin());
            if (out.mask[r * C + wc] && out.values.at(r, wc) > rules.max_wind_speed)
                exclude_row(r);
        }
    }

    // Unwrap wind direction over the surviving samples.
    {
        const auto wd = std::find(schema.begin(), schema.end(), rules.wind_direction_column);
        if (wd != schema.end()) {
            const std::size_t dc = static_cast<std::size_t>(wd - schema.begin());
            std::vector<double> col(N);
            std::vector<std::uint8_t> m(N);
            for (std::size_t r = 0; r < N; ++r) {
                col[r] = out.values.at(r, dc);
                m[r] = out.mask[r * C + dc];
            }
            unwrap_degrees(col, m);
            for (std::size_t r = 0; r < N; ++r) out.values.at(r, dc) = col[r];
        }
    }

    // Per-channel linear interpolation across short gaps.
    for (std::size_t c = 0; c < C; ++c) {
        std::size_t r = 0;
        while (r < N) {
            if (out.mask[r * C + c]) {
                ++r;
                continue;
            }
            const std::size_t gap_begin = r;
            while (r < N && !out.mask[r * C + c]) ++r;
            const std::size_t gap_end = r;  // exclusive
            const std::size_t gap_len = gap_end - gap_begin;
            if (gap_len > rules.max_gap) continue;
            if (gap_begin == 0 || gap_end == N) continue;  // no anchor on one side
            const double left = out.values.at(gap_begin - 1, c);
            const double right = out.values.at(gap_end, c);
            const double denom = static_cast<double>(gap_len + 1);
            for (std::size_t k = 0; k < gap_len; ++k) {
                const double t = static_cast<double>(k + 1) / denom;
                out.values.at(gap_begin + k, c) = left + t * (right - left);
                out.mask[(gap_begin + k) * C + c] = 1;
            }
        }
    }

    bool any_valid = false;
    for (std::size_t r = 0; r < N && !any_valid; ++r) any_valid = out.row_valid(r);
    if (!any_valid) throw std::runtime_error("csv: no valid rows after filtering");
    return out;
}

}  // namespace qts::data
