#include "qts/data/lorenz.hpp"

#include <cmath>
#include <stdexcept>

namespace qts::data {

RawSeries lorenz_generate(std::size_t n_points, double dt, const LorenzParams& p) {
    if (n_points < 2) throw std::invalid_argument("lorenz_generate: need at least 2 points");
    if (dt <= 0.0) throw std::invalid_argument("lorenz_generate: dt must be positive");

    diff::Tensor values(n_points, 3);
    double x = p.x0[0], y = p.x0[1], z = p.x0[2];
    for (std::size_t i = 0; i < n_points; ++i) {
        values.at(i, 0) = x;
        values.at(i, 1) = y;
        values.at(i, 2) = z;
        const double dx = p.sigma * (y - x);
        const double dy = -y - z * x + p.rho * x;
        const double dz = -p.beta * z + x * y;
        x += dt * dx;
        y += dt * dy;
        z += dt * dz;
        if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
            throw std::runtime_error("lorenz_generate: trajectory diverged, reduce dt");
    }
    return RawSeries::dense({"x", "y", "z"}, std::move(values));
}

}  // namespace qts::data
