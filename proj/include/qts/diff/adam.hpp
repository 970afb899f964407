#pragma once

#include <vector>

#include "qts/diff/tensor.hpp"

namespace qts::diff {

struct AdamConfig {
    double lr = 5e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// First/second moment buffers, zero-initialized on first use; t counts steps.
struct AdamState {
    std::vector<Tensor> m;
    std::vector<Tensor> v;
    long t = 0;
};

/// Standard Adam update with bias correction. Buffers are created lazily to
/// match the parameter shapes on the first call.
void adam_step(std::vector<Tensor*>& params, const std::vector<Tensor>& grads, AdamState& state,
               const AdamConfig& cfg);

}  // namespace qts::diff
