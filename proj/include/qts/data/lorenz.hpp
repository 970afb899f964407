#pragma once

#include <array>

#include "qts/data/series.hpp"

namespace qts::data {

struct LorenzParams {
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 8.0 / 3.0;
    std::array<double, 3> x0{0.0, -0.01, 9.0};
};

/// Forward-Euler trajectory of
///   dx/dt = sigma (y - x)
///   dy/dt = -y - z x + rho x
///   dz/dt = -beta z + x y
/// Returns n_points rows including the initial point. Throws if the state
/// leaves the finite range (dt too large).
RawSeries lorenz_generate(std::size_t n_points, double dt, const LorenzParams& p = {});

}  // namespace qts::data
