#pragma once

#include <span>
#include <vector>

#include "qts/diff/tape.hpp"

namespace qts::diff {

// Elementwise and reduction ops. All forwards are standard; backwards apply
// exact analytic gradients and are covered by finite-difference tests.

VarId add(Tape& t, VarId a, VarId b);
VarId sub(Tape& t, VarId a, VarId b);
VarId mul(Tape& t, VarId a, VarId b);
/// k * a + m, elementwise with scalar constants.
VarId scale_shift(Tape& t, VarId a, double k, double m = 0.0);
VarId relu(Tape& t, VarId a);
VarId exp(Tape& t, VarId a);
VarId square(Tape& t, VarId a);
/// Mean over all elements; returns a scalar.
VarId mean(Tape& t, VarId a);

VarId matmul(Tape& t, VarId a, VarId b);
VarId transpose(Tape& t, VarId a);
/// y = x * W^T + b, applied to every row of x. W is (out x in), b is (1 x out).
VarId affine(Tape& t, VarId x, VarId W, VarId b);

/// Row-wise softmax.
VarId softmax(Tape& t, VarId a);
/// Row-wise layer normalization without affine terms: (x - mu) / sqrt(var + eps).
VarId layer_norm(Tape& t, VarId a, double eps);
/// y[r, :] = a[r, :] * gain + offset with gain/offset of shape (1 x cols).
VarId rows_scale_shift(Tape& t, VarId a, VarId gain, VarId offset);

/// Extracts row i as (1 x cols); backward scatters into the source row.
VarId row(Tape& t, VarId a, std::size_t i);
/// Extracts column j as (rows x 1).
VarId col(Tape& t, VarId a, std::size_t j);
/// Stacks 1 x c rows into an (n x c) matrix.
VarId vstack(Tape& t, std::span<const VarId> parts);
/// Concatenates 1 x c_i row vectors into one row.
VarId hstack(Tape& t, std::span<const VarId> parts);
/// Same data reinterpreted with a new shape (row-major order preserved).
VarId reshape(Tape& t, VarId a, std::size_t rows, std::size_t cols);

/// Per-window normalization statistics of a (T x C) window, one entry per
/// channel column. Captured at graph build time and treated as constants by
/// the matching denormalization op.
struct WindowStats {
    std::vector<double> mu;
    std::vector<double> sigma;  // sqrt(var + eps)
};

WindowStats window_stats(const Tensor& x, double eps);

/// Restores per-channel location/scale that window_stats removed, then
/// inverts the trainable affine: out[:, c] = (y[:, c] - offset[c]) / gain[c]
/// * sigma[m] + mu[m] with m = channel_map[c]. The stats are constants; the
/// input window is data, not a differentiable path.
VarId window_denorm(Tape& t, VarId y, VarId gain, VarId offset, WindowStats stats,
                    std::vector<std::size_t> channel_map);

/// Gaussian-kernel attention: alpha[c, c'] = exp(-(q[c] - k[c'])^2), rows
/// normalized to sum 1, output = alpha_normalized * v. q and k are (C x 1),
/// v is (C x D).
VarId gaussian_attention(Tape& t, VarId q, VarId k, VarId v);

/// Row-normalized Gaussian coefficient matrix for given q, k columns.
Tensor gaussian_attention_matrix(const Tensor& q, const Tensor& k);

}  // namespace qts::diff
