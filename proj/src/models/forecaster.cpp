#include "qts/models/forecaster.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qts::models {

diff::Tensor Forecaster::predict(const diff::Tensor& window) const {
    diff::Tape tape;
    const BuiltGraph g = build(tape, window, false);
    return tape.value(g.prediction);
}

Param& Forecaster::parameter(const std::string& name) {
    for (Param& p : params_)
        if (p.name == name) return p;
    throw std::invalid_argument("unknown parameter '" + name + "'");
}

long Forecaster::param_count() const {
    long total = 0;
    for (const Param& p : params_) total += static_cast<long>(p.value.size());
    return total;
}

std::vector<std::pair<std::string, long>> Forecaster::param_breakdown() const {
    std::vector<std::pair<std::string, long>> out;
    for (const Param& p : params_)
        out.emplace_back(p.name, static_cast<long>(p.value.size()));
    return out;
}

void Forecaster::init_params(std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    for (Param& p : params_) {
        switch (p.init) {
            case Param::Init::UniformFanIn: {
                const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(
                                               p.fan_in, 1)));
                std::uniform_real_distribution<double> dist(-bound, bound);
                for (double& v : p.value.data) v = dist(rng);
                break;
            }
            case Param::Init::Angles: {
                std::uniform_real_distribution<double> dist(0.0, 2.0 * std::numbers::pi);
                for (double& v : p.value.data) v = dist(rng);
                break;
            }
            case Param::Init::Ones:
                for (double& v : p.value.data) v = 1.0;
                break;
            case Param::Init::Zeros:
                for (double& v : p.value.data) v = 0.0;
                break;
        }
    }
}

Param& Forecaster::add_param(std::string name, std::size_t rows, std::size_t cols,
                             Param::Init init, std::size_t fan_in) {
    Param p;
    p.name = std::move(name);
    p.value = diff::Tensor(rows, cols);
    p.init = init;
    p.fan_in = fan_in;
    params_.push_back(std::move(p));
    return params_.back();
}

std::vector<diff::VarId> Forecaster::leaf_params(diff::Tape& tape, bool train) const {
    std::vector<diff::VarId> ids;
    ids.reserve(params_.size());
    for (const Param& p : params_) ids.push_back(tape.leaf(p.value, train));
    return ids;
}

void Forecaster::check_window(const diff::Tensor& window) const {
    if (window.rows != static_cast<std::size_t>(cfg_.lookback) ||
        window.cols != static_cast<std::size_t>(cfg_.channels))
        throw std::invalid_argument("forecaster: window shape does not match the configuration");
}

}  // namespace qts::models
