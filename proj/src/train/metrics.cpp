#include "qts/train/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace qts::train {

double mse(const diff::Tensor& pred, const diff::Tensor& target) {
    if (!pred.same_shape(target)) throw std::invalid_argument("mse: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred.data[i] - target.data[i];
        s += d * d;
    }
    return s / static_cast<double>(pred.size());
}

void MetricAccumulator::add(const diff::Tensor& pred, const diff::Tensor& target) {
    if (!pred.same_shape(target)) throw std::invalid_argument("metrics: shape mismatch");
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred.data[i] - target.data[i];
        abs_sum += std::abs(d);
        sq_sum += d * d;
        ape_sum += std::abs(d) / (std::abs(target.data[i]) + kMapeEps);
    }
    count += pred.size();
}

void MetricAccumulator::merge(const MetricAccumulator& o) {
    abs_sum += o.abs_sum;
    sq_sum += o.sq_sum;
    ape_sum += o.ape_sum;
    count += o.count;
}

Metrics MetricAccumulator::finalize() const {
    if (count == 0) throw std::invalid_argument("metrics: empty accumulator");
    Metrics m;
    const double n = static_cast<double>(count);
    m.mae = abs_sum / n;
    m.rmse = std::sqrt(sq_sum / n);
    m.mape = ape_sum / n;
    return m;
}

Metrics metrics(const diff::Tensor& pred, const diff::Tensor& target) {
    MetricAccumulator acc;
    acc.add(pred, target);
    return acc.finalize();
}

}  // namespace qts::train
