#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "qts/diff/quantum_node.hpp"
#include "qts/diff/tape.hpp"
#include "qts/models/config.hpp"

namespace qts::models {

struct Param {
    enum class Init { UniformFanIn, Angles, Ones, Zeros };

    std::string name;
    diff::Tensor value;
    Init init = Init::UniformFanIn;
    std::size_t fan_in = 0;
};

struct BuiltGraph {
    diff::VarId prediction = -1;       // (S x C), or (S x 1) in target mode
    std::vector<diff::VarId> params;   // leaf ids in parameters() order; empty when !train
};

/// Maps a lookback window (T x C, normalized) to a horizon prediction and
/// exposes every trainable scalar. Forward graphs are rebuilt per window;
/// the model itself is immutable during evaluation, so windows may be
/// processed on separate threads.
class Forecaster {
  public:
    explicit Forecaster(ModelConfig cfg) : cfg_(std::move(cfg)) {}
    virtual ~Forecaster() = default;

    const ModelConfig& config() const { return cfg_; }

    /// Builds the forward graph. With train = true, parameters enter the tape
    /// as gradient leaves listed in BuiltGraph::params.
    virtual BuiltGraph build(diff::Tape& tape, const diff::Tensor& window,
                             bool train) const = 0;

    diff::Tensor predict(const diff::Tensor& window) const;

    std::vector<Param>& parameters() { return params_; }
    const std::vector<Param>& parameters() const { return params_; }
    Param& parameter(const std::string& name);

    long param_count() const;
    std::vector<std::pair<std::string, long>> param_breakdown() const;

    /// Deterministic seeded initialization: classical weights uniform in
    /// [-1/sqrt(fan_in), 1/sqrt(fan_in)], rotation angles uniform in [0, 2pi).
    void init_params(std::uint64_t seed);

  protected:
    Param& add_param(std::string name, std::size_t rows, std::size_t cols, Param::Init init,
                     std::size_t fan_in = 0);
    std::vector<diff::VarId> leaf_params(diff::Tape& tape, bool train) const;
    void check_window(const diff::Tensor& window) const;

    ModelConfig cfg_;
    std::vector<Param> params_;
};

std::unique_ptr<Forecaster> make_forecaster(const ModelConfig& cfg);

}  // namespace qts::models
