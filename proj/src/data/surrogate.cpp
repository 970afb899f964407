#include "qts/data/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace qts::data {

const std::vector<std::string>& surrogate_schema() {
    static const std::vector<std::string> names{
        "total_energy_demand", "renewable_production", "renewable_percentage",
        "normalized_power",    "wind_speed",           "wind_direction",
        "curtailment_setpoint"};
    return names;
}

RawSeries surrogate_series(std::size_t n_points, std::uint64_t seed) {
    if (n_points < 2) throw std::invalid_argument("surrogate_series: need at least 2 points");
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    constexpr double kDay = 96.0;  // 15-minute samples per day

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    diff::Tensor v(n_points, 7);
    double wind = 9.0;
    double direction = 180.0;
    double demand_ar = 0.0;
    double production_ema = 80.0;
    for (std::size_t i = 0; i < n_points; ++i) {
        const double day_phase = kTwoPi * static_cast<double>(i) / kDay;
        const double week_phase = day_phase / 7.0;

        demand_ar = 0.95 * demand_ar + 4.0 * noise(rng);
        const double demand =
            520.0 + 110.0 * std::sin(day_phase - 1.1) + 35.0 * std::sin(week_phase) + demand_ar;

        wind += 0.04 * (9.0 - wind) + 0.55 * noise(rng);
        wind = std::clamp(wind, 0.0, 24.5);

        direction += 2.5 * noise(rng) + 0.08;
        const double direction_wrapped = direction - 360.0 * std::floor(direction / 360.0);

        const double curve = std::clamp((wind - 3.0) / 9.0, 0.0, 1.0);
        const double power = curve * curve * (3.0 - 2.0 * curve);  // smoothstep power curve

        const double production = 40.0 + 170.0 * power + 12.0 * std::sin(day_phase - 0.4);
        production_ema = 0.97 * production_ema + 0.03 * production;

        const double pct = std::clamp(100.0 * production / demand, 0.0, 100.0);
        const double curtailment = std::clamp(
            55.0 + 0.45 * production_ema - 0.05 * demand + 9.0 * std::sin(day_phase + 0.7), 0.0,
            200.0);

        v.at(i, 0) = demand;
        v.at(i, 1) = production;
        v.at(i, 2) = pct;
        v.at(i, 3) = power;
        v.at(i, 4) = wind;
        v.at(i, 5) = direction_wrapped;
        v.at(i, 6) = curtailment;
    }
    return RawSeries::dense(surrogate_schema(), std::move(v));
}

}  // namespace qts::data
