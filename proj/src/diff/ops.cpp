#include "qts/diff/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qts::diff {

namespace {

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b)) throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

bool any_grad(Tape& t, std::initializer_list<VarId> ids) {
    for (VarId id : ids)
        if (t.requires_grad(id)) return true;
    return false;
}

}  // namespace

VarId add(Tape& t, VarId a, VarId b) {
    const Tensor& va = t.value(a);
    const Tensor& vb = t.value(b);
    check_same_shape(va, vb, "add");
    Tensor out = va;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += vb.data[i];
    return t.emplace(std::move(out), any_grad(t, {a, b}), [a, b](Tape& tp, const Tensor& g) {
        tp.accumulate(a, g);
        tp.accumulate(b, g);
    });
}

VarId sub(Tape& t, VarId a, VarId b) {
    const Tensor& va = t.value(a);
    const Tensor& vb = t.value(b);
    check_same_shape(va, vb, "sub");
    Tensor out = va;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] -= vb.data[i];
    return t.emplace(std::move(out), any_grad(t, {a, b}), [a, b](Tape& tp, const Tensor& g) {
        tp.accumulate(a, g);
        tp.accumulate_scaled(b, g, -1.0);
    });
}

VarId mul(Tape& t, VarId a, VarId b) {
    const Tensor& va = t.value(a);
    const Tensor& vb = t.value(b);
    check_same_shape(va, vb, "mul");
    Tensor out = va;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] *= vb.data[i];
    return t.emplace(std::move(out), any_grad(t, {a, b}),
                     [a, b, va, vb](Tape& tp, const Tensor& g) {
                         Tensor ga = g;
                         for (std::size_t i = 0; i < ga.size(); ++i) ga.data[i] *= vb.data[i];
                         tp.accumulate(a, ga);
                         Tensor gb = g;
                         for (std::size_t i = 0; i < gb.size(); ++i) gb.data[i] *= va.data[i];
                         tp.accumulate(b, gb);
                     });
}

VarId scale_shift(Tape& t, VarId a, double k, double m) {
    Tensor out = t.value(a);
    for (double& v : out.data) v = k * v + m;
    return t.emplace(std::move(out), t.requires_grad(a), [a, k](Tape& tp, const Tensor& g) {
        tp.accumulate_scaled(a, g, k);
    });
}

VarId relu(Tape& t, VarId a) {
    const Tensor& va = t.value(a);
    Tensor out = va;
    for (double& v : out.data) v = std::max(0.0, v);
    return t.emplace(std::move(out), t.requires_grad(a), [a, va](Tape& tp, const Tensor& g) {
        Tensor ga = g;
        for (std::size_t i = 0; i < ga.size(); ++i)
            if (va.data[i] <= 0.0) ga.data[i] = 0.0;
        tp.accumulate(a, ga);
    });
}

VarId exp(Tape& t, VarId a) {
    Tensor out = t.value(a);
    for (double& v : out.data) v = std::exp(v);
    const Tensor saved = out;
    return t.emplace(std::move(out), t.requires_grad(a), [a, saved](Tape& tp, const Tensor& g) {
        Tensor ga = g;
        for (std::size_t i = 0; i < ga.size(); ++i) ga.data[i] *= saved.data[i];
        tp.accumulate(a, ga);
    });
}

VarId square(Tape& t, VarId a) {
    const Tensor& va = t.value(a);
    Tensor out = va;
    for (double& v : out.data) v *= v;
    return t.emplace(std::move(out), t.requires_grad(a), [a, va](Tape& tp, const Tensor& g) {
        Tensor ga = g;
        for (std::size_t i = 0; i < ga.size(); ++i) ga.data[i] *= 2.0 * va.data[i];
        tp.accumulate(a, ga);
    });
}

VarId mean(Tape& t, VarId a) {
    const Tensor& va = t.value(a);
    if (va.size() == 0) throw std::invalid_argument("mean: empty tensor");
    double s = 0.0;
    for (double v : va.data) s += v;
    const double inv_n = 1.0 / static_cast<double>(va.size());
    Tensor out = Tensor::scalar(s * inv_n);
    const std::size_t r = va.rows, c = va.cols;
    return t.emplace(std::move(out), t.requires_grad(a),
                     [a, inv_n, r, c](Tape& tp, const Tensor& g) {
                         Tensor ga(r, c, g.data[0] * inv_n);
                         tp.accumulate(a, ga);
                     });
}

VarId matmul(Tape& t, VarId a, VarId b) {
    const Tensor& va = t.value(a);
    const Tensor& vb = t.value(b);
    if (va.cols != vb.rows) throw std::invalid_argument("matmul: inner dimension mismatch");
    Tensor out(va.rows, vb.cols);
    for (std::size_t i = 0; i < va.rows; ++i)
        for (std::size_t k = 0; k < va.cols; ++k) {
            const double aik = va.at(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < vb.cols; ++j) out.at(i, j) += aik * vb.at(k, j);
        }
    return t.emplace(std::move(out), any_grad(t, {a, b}),
                     [a, b, va, vb](Tape& tp, const Tensor& g) {
                         if (tp.requires_grad(a)) {
                             Tensor ga(va.rows, va.cols);
                             for (std::size_t i = 0; i < va.rows; ++i)
                                 for (std::size_t j = 0; j < vb.cols; ++j) {
                                     const double gij = g.at(i, j);
                                     for (std::size_t k = 0; k < va.cols; ++k)
                                         ga.at(i, k) += gij * vb.at(k, j);
                                 }
                             tp.accumulate(a, ga);
                         }
                         if (tp.requires_grad(b)) {
                             Tensor gb(vb.rows, vb.cols);
                             for (std::size_t i = 0; i < va.rows; ++i)
                                 for (std::size_t k = 0; k < va.cols; ++k) {
                                     const double aik = va.at(i, k);
                                     if (aik == 0.0) continue;
                                     for (std::size_t j = 0; j < vb.cols; ++j)
                                         gb.at(k, j) += aik * g.at(i, j);
                                 }
                             tp.accumulate(b, gb);
                         }
                     });
}

VarId transpose(Tape& t, VarId a) {
    const Tensor& va = t.value(a);
    Tensor out(va.cols, va.rows);
    for (std::size_t i = 0; i < va.rows; ++i)
        for (std::size_t j = 0; j < va.cols; ++j) out.at(j, i) = va.at(i, j);
    return t.emplace(std::move(out), t.requires_grad(a), [a](Tape& tp, const Tensor& g) {
        Tensor ga(g.cols, g.rows);
        for (std::size_t i = 0; i < g.rows; ++i)
            for (std::size_t j = 0; j < g.cols; ++j) ga.at(j, i) = g.at(i, j);
        tp.accumulate(a, ga);
    });
}

VarId affine(Tape& t, VarId x, VarId W, VarId b) {
    const Tensor& vx = t.value(x);
    const Tensor& vW = t.value(W);
    const Tensor& vb = t.value(b);
    if (vx.cols != vW.cols) throw std::invalid_argument("affine: input width mismatch");
    if (vb.rows != 1 || vb.cols != vW.rows)
        throw std::invalid_argument("affine: bias shape mismatch");
    Tensor out(vx.rows, vW.rows);
    for (std::size_t r = 0; r < vx.rows; ++r)
        for (std::size_t o = 0; o < vW.rows; ++o) {
            double s = vb.data[o];
            for (std::size_t i = 0; i < vx.cols; ++i) s += vx.at(r, i) * vW.at(o, i);
            out.at(r, o) = s;
        }
    return t.emplace(std::move(out), any_grad(t, {x, W, b}),
                     [x, W, b, vx, vW](Tape& tp, const Tensor& g) {
                         if (tp.requires_grad(x)) {
                             Tensor gx(vx.rows, vx.cols);
                             for (std::size_t r = 0; r < vx.rows; ++r)
                                 for (std::size_t o = 0; o < vW.rows; ++o) {
                                     const double go = g.at(r, o);
                                     for (std::size_t i = 0; i < vx.cols; ++i)
                                         gx.at(r, i) += go * vW.at(o, i);
                                 }
                             tp.accumulate(x, gx);
                         }
                         if (tp.requires_grad(W)) {
                             Tensor gW(vW.rows, vW.cols);
                             for (std::size_t r = 0; r < vx.rows; ++r)
                                 for (std::size_t o = 0; o < vW.rows; ++o) {
                                     const double go = g.at(r, o);
                                     for (std::size_t i = 0; i < vx.cols; ++i)
                                         gW.at(o, i) += go * vx.at(r, i);
                                 }
                             tp.accumulate(W, gW);
                         }
                         if (tp.requires_grad(b)) {
                             Tensor gb(1, g.cols);
                             for (std::size_t r = 0; r < g.rows; ++r)
                                 for (std::size_t o = 0; o < g.cols; ++o)
                                     gb.data[o] += g.at(r, o);
                             tp.accumulate(b, gb);
                         }
                     });
}

VarId softmax(Tape& t, VarId a) {
    const Tensor& va = t.value(a);
    Tensor out(va.rows, va.cols);
    for (std::size_t r = 0; r < va.rows; ++r) {
        double mx = va.at(r, 0);
        for (std::size_t c = 1; c < va.cols; ++c) mx = std::max(mx, va.at(r, c));
        double s = 0.0;
        for (std::size_t c = 0; c < va.cols; ++c) {
            const double e = std::exp(va.at(r, c) - mx);
            out.at(r, c) = e;
            s += e;
        }
        for (std::size_t c = 0; c < va.cols; ++c) out.at(r, c) /= s;
    }
    const Tensor saved = out;
    return t.emplace(std::move(out), t.requires_grad(a), [a, saved](Tape& tp, const Tensor& g) {
        Tensor ga(saved.rows, saved.cols);
        for (std::size_t r = 0; r < saved.rows; ++r) {
            double dot = 0.0;
            for (std::size_t c = 0; c < saved.cols; ++c) dot += g.at(r, c) * saved.at(r, c);
            for (std::size_t c = 0; c < saved.cols; ++c)
                ga.at(r, c) = saved.at(r, c) * (g.at(r, c) - dot);
        }
        tp.accumulate(a, ga);
    });
}

VarId layer_norm(Tape& t, VarId a, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("layer_norm: eps must be positive");
    const Tensor& va = t.value(a);
    Tensor out(va.rows, va.cols);
    std::vector<double> inv_std(va.rows);
    const double inv_n = 1.0 / static_cast<double>(va.cols);
    for (std::size_t r = 0; r < va.rows; ++r) {
        double mu = 0.0;
        for (std::size_t c = 0; c < va.cols; ++c) mu += va.at(r, c);
        mu *= inv_n;
        double var = 0.0;
        for (std::size_t c = 0; c < va.cols; ++c) {
            const double d = va.at(r, c) - mu;
            var += d * d;
        }
        var *= inv_n;
        const double is = 1.0 / std::sqrt(var + eps);
        inv_std[r] = is;
        for (std::size_t c = 0; c < va.cols; ++c) out.at(r, c) = (va.at(r, c) - mu) * is;
    }
    const Tensor saved = out;
    return t.emplace(std::move(out), t.requires_grad(a),
                     [a, saved, inv_std, inv_n](Tape& tp, const Tensor& g) {
                         Tensor ga(saved.rows, saved.cols);
                         for (std::size_t r = 0; r < saved.rows; ++r) {
                             double gm = 0.0, gy = 0.0;
                             for (std::size_t c = 0; c < saved.cols; ++c) {
                                 gm += g.at(r, c);
                                 gy += g.at(r, c) * saved.at(r, c);
                             }
                             gm *= inv_n;
                             gy *= inv_n;
                             for (std::size_t c = 0; c < saved.cols; ++c)
                                 ga.at(r, c) =
                                     inv_std[r] * (g.at(r, c) - gm - saved.at(r, c) * gy);
                         }
                         tp.accumulate(a, ga);
                     });
}

VarId rows_scale_shift(Tape& t, VarId a, VarId gain, VarId offset) {
    const Tensor& va = t.value(a);
    const Tensor& vg = t.value(gain);
    const Tensor& vo = t.value(offset);
    if (vg.rows != 1 || vg.cols != va.cols || vo.rows != 1 || vo.cols != va.cols)
        throw std::invalid_argument("rows_scale_shift: gain/offset must be 1 x cols");
    Tensor out(va.rows, va.cols);
    for (std::size_t r = 0; r < va.rows; ++r)
        for (std::size_t c = 0; c < va.cols; ++c)
            out.at(r, c) = va.at(r, c) * vg.data[c] + vo.data[c];
    return t.emplace(std::move(out), any_grad(t, {a, gain, offset}),
                     [a, gain, offset, va, vg](Tape& tp, const Tensor& g) {
                         if (tp.requires_grad(a)) {
                             Tensor ga(va.rows, va.cols);
                             for (std::size_t r = 0; r < va.rows; ++r)
                                 for (std::size_t c = 0; c < va.cols; ++c)
                                     ga.at(r, c) = g.at(r, c) * vg.data[c];
                             tp.accumulate(a, ga);
                         }
                         if (tp.requires_grad(gain)) {
                             Tensor gg(1, va.cols);
                             for (std::size_t r = 0; r < va.rows; ++r)
                                 for (std::size_t c = 0; c < va.cols; ++c)
                                     gg.data[c] += g.at(r, c) * va.at(r, c);
                             tp.accumulate(gain, gg);
                         }
                         if (tp.requires_grad(offset)) {
                             Tensor go(1, va.cols);
                             for (std::size_t r = 0; r < va.rows; ++r)
                                 for (std::size_t c = 0; c < va.cols; ++c)
                                     go.data[c] += g.at(r, c);
                             tp.accumulate(offset, go);
                         }
                     });
}

VarId row(Tape& t, VarId a, std::size_t i) {
    const Tensor& va = t.value(a);
    if (i >= va.rows) throw std::invalid_argument("row: index out of range");
    Tensor out(1, va.cols);
    for (std::size_t c = 0; c < va.cols; ++c) out.data[c] = va.at(i, c);
    const std::size_t rows = va.rows;
    return t.emplace(std::move(out), t.requires_grad(a), [a, i, rows](Tape& tp, const Tensor& g) {
        Tensor ga(rows, g.cols);
        for (std::size_t c = 0; c < g.cols; ++c) ga.at(i, c) = g.data[c];
        tp.accumulate(a, ga);
    });
}

VarId col(Tape& t, VarId a, std::size_t j) {
    const Tensor& va = t.value(a);
    if (j >= va.cols) throw std::invalid_argument("col: index out of range");
    Tensor out(va.rows, 1);
    for (std::size_t r = 0; r < va.rows; ++r) out.data[r] = va.at(r, j);
    const std::size_t cols = va.cols;
    return t.emplace(std::move(out), t.requires_grad(a), [a, j, cols](Tape& tp, const Tensor& g) {
        Tensor ga(g.rows, cols);
        for (std::size_t r = 0; r < g.rows; ++r) ga.at(r, j) = g.data[r];
        tp.accumulate(a, ga);
    });
}

VarId vstack(Tape& t, std::span<const VarId> parts) {
    if (parts.empty()) throw std::invalid_argument("vstack: no parts");
    const std::size_t cols = t.value(parts[0]).cols;
    Tensor out(parts.size(), cols);
    bool grad = false;
    for (std::size_t r = 0; r < parts.size(); ++r) {
        const Tensor& v = t.value(parts[r]);
        if (v.rows != 1 || v.cols != cols) throw std::invalid_argument("vstack: shape mismatch");
        for (std::size_t c = 0; c < cols; ++c) out.at(r, c) = v.data[c];
        grad = grad || t.requires_grad(parts[r]);
    }
    std::vector<VarId> ids(parts.begin(), parts.end());
    return t.emplace(std::move(out), grad, [ids](Tape& tp, const Tensor& g) {
        for (std::size_t r = 0; r < ids.size(); ++r) {
            Tensor gr(1, g.cols);
            for (std::size_t c = 0; c < g.cols; ++c) gr.data[c] = g.at(r, c);
            tp.accumulate(ids[r], gr);
        }
    });
}

VarId hstack(Tape& t, std::span<const VarId> parts) {
    if (parts.empty()) throw std::invalid_argument("hstack: no parts");
    std::size_t total = 0;
    bool grad = false;
    for (VarId p : parts) {
        const Tensor& v = t.value(p);
        if (v.rows != 1) throw std::invalid_argument("hstack: parts must be row vectors");
        total += v.cols;
        grad = grad || t.requires_grad(p);
    }
    Tensor out(1, total);
    std::size_t off = 0;
    for (VarId p : parts) {
        const Tensor& v = t.value(p);
        for (std::size_t c = 0; c < v.cols; ++c) out.data[off + c] = v.data[c];
        off += v.cols;
    }
    std::vector<VarId> ids(parts.begin(), parts.end());
    std::vector<std::size_t> widths;
    for (VarId p : parts) widths.push_back(t.value(p).cols);
    return t.emplace(std::move(out), grad, [ids, widths](Tape& tp, const Tensor& g) {
        std::size_t off = 0;
        for (std::size_t k = 0; k < ids.size(); ++k) {
            Tensor gk(1, widths[k]);
            for (std::size_t c = 0; c < widths[k]; ++c) gk.data[c] = g.data[off + c];
            tp.accumulate(ids[k], gk);
            off += widths[k];
        }
    });
}

VarId reshape(Tape& t, VarId a, std::size_t rows, std::size_t cols) {
    const Tensor& va = t.value(a);
    if (rows * cols != va.size()) throw std::invalid_argument("reshape: element count mismatch");
    Tensor out = Tensor::from_rows(rows, cols, va.data);
    const std::size_t orows = va.rows, ocols = va.cols;
    return t.emplace(std::move(out), t.requires_grad(a),
                     [a, orows, ocols](Tape& tp, const Tensor& g) {
                         tp.accumulate(a, Tensor::from_rows(orows, ocols, g.data));
                     });
}

WindowStats window_stats(const Tensor& x, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("window_stats: eps must be positive");
    WindowStats s;
    s.mu.resize(x.cols);
    s.sigma.resize(x.cols);
    const double inv_n = 1.0 / static_cast<double>(x.rows);
    for (std::size_t c = 0; c < x.cols; ++c) {
        double mu = 0.0;
        for (std::size_t r = 0; r < x.rows; ++r) mu += x.at(r, c);
        mu *= inv_n;
        double var = 0.0;
        for (std::size_t r = 0; r < x.rows; ++r) {
            const double d = x.at(r, c) - mu;
            var += d * d;
        }
        var *= inv_n;
        s.mu[c] = mu;
        s.sigma[c] = std::sqrt(var + eps);
    }
    return s;
}

VarId window_denorm(Tape& t, VarId y, VarId gain, VarId offset, WindowStats stats,
                    std::vector<std::size_t> channel_map) {
    const Tensor& vy = t.value(y);
    const Tensor& vg = t.value(gain);
    const Tensor& vo = t.value(offset);
    if (channel_map.size() != vy.cols)
        throw std::invalid_argument("window_denorm: channel map width mismatch");
    for (std::size_t m : channel_map)
        if (m >= stats.mu.size() || m >= vg.cols || m >= vo.cols)
            throw std::invalid_argument("window_denorm: channel map index out of range");
    Tensor out(vy.rows, vy.cols);
    for (std::size_t c = 0; c < vy.cols; ++c) {
        const std::size_t m = channel_map[c];
        const double g = vg.data[m], o = vo.data[m];
        for (std::size_t r = 0; r < vy.rows; ++r)
            out.at(r, c) = (vy.at(r, c) - o) / g * stats.sigma[m] + stats.mu[m];
    }
    return t.emplace(
        std::move(out), any_grad(t, {y, gain, offset}),
        [y, gain, offset, vy, vg, vo, stats, channel_map](Tape& tp, const Tensor& gr) {
            if (tp.requires_grad(y)) {
                Tensor gy(vy.rows, vy.cols);
                for (std::size_t c = 0; c < vy.cols; ++c) {
                    const std::size_t m = channel_map[c];
                    const double k = stats.sigma[m] / vg.data[m];
                    for (std::size_t r = 0; r < vy.rows; ++r) gy.at(r, c) = gr.at(r, c) * k;
                }
                tp.accumulate(y, gy);
            }
            if (tp.requires_grad(gain)) {
                Tensor gg(1, vg.cols);
                for (std::size_t c = 0; c < vy.cols; ++c) {
                    const std::size_t m = channel_map[c];
                    const double g2 = vg.data[m] * vg.data[m];
                    for (std::size_t r = 0; r < vy.rows; ++r)
                        gg.data[m] -=
                            gr.at(r, c) * (vy.at(r, c) - vo.data[m]) * stats.sigma[m] / g2;
                }
                tp.accumulate(gain, gg);
            }
            if (tp.requires_grad(offset)) {
                Tensor go(1, vo.cols);
                for (std::size_t c = 0; c < vy.cols; ++c) {
                    const std::size_t m = channel_map[c];
                    for (std::size_t r = 0; r < vy.rows; ++r)
                        go.data[m] -= gr.at(r, c) * stats.sigma[m] / vg.data[m];
                }
                tp.accumulate(offset, go);
            }
        });
}

Tensor gaussian_attention_matrix(const Tensor& q, const Tensor& k) {
    if (q.cols != 1 || k.cols != 1 || q.rows != k.rows)
        throw std::invalid_argument("gaussian_attention: q and k must be matching columns");
    const std::size_t C = q.rows;
    Tensor alpha(C, C);
    for (std::size_t i = 0; i < C; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < C; ++j) {
            const double d = q.data[i] - k.data[j];
            const double a = std::exp(-d * d);
            alpha.at(i, j) = a;
            sum += a;
        }
        for (std::size_t j = 0; j < C; ++j) alpha.at(i, j) /= sum;
    }
    return alpha;
}

VarId gaussian_attention(Tape& t, VarId q, VarId k, VarId v) {
    const Tensor vq = t.value(q);
    const Tensor vk = t.value(k);
    const Tensor vv = t.value(v);
    if (vv.rows != vq.rows) throw std::invalid_argument("gaussian_attention: v row mismatch");
    const Tensor alpha = gaussian_attention_matrix(vq, vk);
    const std::size_t C = vq.rows, D = vv.cols;
    Tensor out(C, D);
    for (std::size_t i = 0; i < C; ++i)
        for (std::size_t j = 0; j < C; ++j) {
            const double a = alpha.at(i, j);
            for (std::size_t d = 0; d < D; ++d) out.at(i, d) += a * vv.at(j, d);
        }
    return t.emplace(
        std::move(out), any_grad(t, {q, k, v}),
        [q, k, v, vq, vk, vv, alpha](Tape& tp, const Tensor& g) {
            const std::size_t C = vq.rows, D = vv.cols;
            if (tp.requires_grad(v)) {
                Tensor gv(C, D);
                for (std::size_t i = 0; i < C; ++i)
                    for (std::size_t j = 0; j < C; ++j) {
                        const double a = alpha.at(i, j);
                        for (std::size_t d = 0; d < D; ++d) gv.at(j, d) += a * g.at(i, d);
                    }
                tp.accumulate(v, gv);
            }
            if (tp.requires_grad(q) || tp.requires_grad(k)) {
                // dL/d(alpha_norm[i,j]) = g[i,:] . v[j,:]; fold the row
                // normalization like a softmax, then the Gaussian kernel.
                Tensor gq(C, 1);
                Tensor gk(C, 1);
                for (std::size_t i = 0; i < C; ++i) {
                    std::vector<double> ga(C);
                    double dot = 0.0;
                    for (std::size_t j = 0; j < C; ++j) {
                        double s = 0.0;
                        for (std::size_t d = 0; d < D; ++d) s += g.at(i, d) * vv.at(j, d);
                        ga[j] = s;
                        dot += s * alpha.at(i, j);
                    }
                    for (std::size_t j = 0; j < C; ++j) {
                        const double graw = alpha.at(i, j) * (ga[j] - dot);
                        const double d = vq.data[i] - vk.data[j];
                        gq.data[i] += graw * (-2.0 * d);
                        gk.data[j] += graw * (2.0 * d);
                    }
                }
                tp.accumulate(q, gq);
                tp.accumulate(k, gk);
            }
        });
}

}  // namespace qts::diff
