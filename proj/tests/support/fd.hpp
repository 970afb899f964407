#pragma once

// Central finite differences used as the independent gradient oracle.

#include <cmath>
#include <functional>

#include "qts/diff/tensor.hpp"

namespace qts::testing {

inline constexpr double kFdStep = 1e-4;

/// d f / d x[i] via central differences on a copy of x.
inline double fd_grad(const std::function<double(const diff::Tensor&)>& f, diff::Tensor x,
                      std::size_t i, double step = kFdStep) {
    const double saved = x.data[i];
    x.data[i] = saved + step;
    const double fp = f(x);
    x.data[i] = saved - step;
    const double fm = f(x);
    x.data[i] = saved;
    return (fp - fm) / (2.0 * step);
}

/// Mixed absolute/relative agreement: |a - b| <= tol * max(1, |a|, |b|).
inline bool grad_close(double a, double b, double tol = 1e-5) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace qts::testing
