#include "core/softmax.hpp"

#include <algorithm>
#include <cmath>

namespace rad {
namespace {

void softmax_inplace(std::vector<double>& logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& z : logits) {
    z = std::exp(z - peak);
    total += z;
  }
  for (double& z : logits) z /= total;
}

std::vector<double> logits_for(std::span<const double> weights, std::size_t classes,
                               std::size_t dim, std::span<const double> x) {
  std::vector<double> logits(classes);
  const std::size_t stride = dim + 1;
  for (std::size_t c = 0; c < classes; ++c) {
    const double* w = weights.data() + c * stride;
    double z = w[dim];  // bias
    for (std::size_t j = 0; j < dim; ++j) z += w[j] * x[j];
    logits[c] = z;
  }
  return logits;
}

// Cross-entropy and gradient over a row range [lo, hi).
double accumulate_loss_grad(const Dataset& data, std::span<const double> weights,
                            std::size_t lo, std::size_t hi, double* grad) {
  const std::size_t stride = data.dim + 1;
  double loss = 0.0;
  for (std::size_t r = lo; r < hi; ++r) {
    std::vector<double> p = logits_for(weights, data.classes, data.dim, data.row(r));
    softmax_inplace(p);
    const std::span<const double> t = data.target(r);
    for (std::size_t c = 0; c < data.classes; ++c) {
      if (t[c] > 0.0) loss -= t[c] * std::log(std::max(p[c], 1e-300));
      if (grad != nullptr) {
        const double diff = p[c] - t[c];
        double* g = grad + c * stride;
        const std::span<const double> x = data.row(r);
        for (std::size_t j = 0; j < data.dim; ++j) g[j] += diff * x[j];
        g[data.dim] += diff;
      }
    }
  }
  return loss;
}

}  // namespace

void Dataset::validate() const {
  require(rows >= 1, Errc::config_error, "dataset is empty");
  require(classes >= 2, Errc::too_few_classes, "need at least 2 classes");
  require(features.size() == rows * dim && targets.size() == rows * classes,
          Errc::dimension_mismatch, "dataset buffers do not match its shape");
  for (std::size_t r = 0; r < rows; ++r) {
    double total = 0.0;
    for (double t : target(r)) {
      require(std::isfinite(t) && t >= -1e-12, Errc::not_normalized,
              "targets must be distributions");
      total += t;
    }
    require(std::fabs(total - 1.0) <= 1e-6, Errc::not_normalized,
            "targets must sum to 1");
  }
}

std::vector<double> SoftmaxModel::predict(std::span<const double> x) const {
  std::vector<double> p = logits_for(weights, classes, dim, x);
  softmax_inplace(p);
  return p;
}

std::size_t SoftmaxModel::predict_class(std::span<const double> x) const {
  const std::vector<double> p = predict(x);
  return static_cast<std::size_t>(
      std::max_element(p.begin(), p.end()) - p.begin());
}

double softmax_loss(const Dataset& data, std::span<const double> weights) {
  return accumulate_loss_grad(data, weights, 0, data.rows, nullptr) /
         static_cast<double>(data.rows);
}

std::vector<double> softmax_loss_gradient(const Dataset& data,
                                          std::span<const double> weights) {
  std::vector<double> grad(weights.size(), 0.0);
  accumulate_loss_grad(data, weights, 0, data.rows, grad.data());
  for (double& g : grad) g /= static_cast<double>(data.rows);
  return grad;
}

TrainResult train_softmax(const Dataset& data, const TrainConfig& config) {
  data.validate();
  require(config.epochs >= 0, Errc::config_error, "epochs must be non-negative");
  require(config.learning_rate > 0.0 && std::isfinite(config.learning_rate),
          Errc::config_error, "learning rate must be positive");
  require(config.batch_size >= 0, Errc::config_error, "batch size must be non-negative");

  TrainResult result;
  result.model.classes = data.classes;
  result.model.dim = data.dim;
  result.model.weights.assign(data.classes * (data.dim + 1), 0.0);

  result.epoch_losses.push_back(softmax_loss(data, result.model.weights));

  const std::size_t chunk = config.batch_size == 0
                                ? data.rows
                                : static_cast<std::size_t>(config.batch_size);
  std::vector<double> grad(result.model.weights.size());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t lo = 0; lo < data.rows; lo += chunk) {
      const std::size_t hi = std::min(data.rows, lo + chunk);
      std::fill(grad.begin(), grad.end(), 0.0);
      accumulate_loss_grad(data, result.model.weights, lo, hi, grad.data());
      const double scale = config.learning_rate / static_cast<double>(hi - lo);
      for (std::size_t i = 0; i < grad.size(); ++i) {
        result.model.weights[i] -= scale * grad[i];
      }
    }
    const double loss = softmax_loss(data, result.model.weights);
    require(std::isfinite(loss), Errc::non_finite_loss,
            "training diverged to a non-finite loss");
    result.epoch_losses.push_back(loss);
  }
  return result;
}

}  // namespace rad
