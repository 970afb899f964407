#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace qts::diff {

/// Row-major 2-D real tensor. Scalars are 1x1, row vectors 1xN.
struct Tensor {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    static Tensor scalar(double v) {
        Tensor t(1, 1);
        t.data[0] = v;
        return t;
    }
    static Tensor row(std::initializer_list<double> vs) {
        Tensor t(1, vs.size());
        std::size_t i = 0;
        for (double v : vs) t.data[i++] = v;
        return t;
    }
    static Tensor from_rows(std::size_t r, std::size_t c, std::vector<double> d) {
        if (d.size() != r * c) throw std::invalid_argument("Tensor: data size mismatch");
        Tensor t;
        t.rows = r;
        t.cols = c;
        t.data = std::move(d);
        return t;
    }

    std::size_t size() const { return data.size(); }
    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }

    bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
};

}  // namespace qts::diff
