#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/errors.hpp"

namespace rad {

// Row-major design matrix with per-row soft targets (hard labels enter as
// one-hot rows).
struct Dataset {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::size_t classes = 0;
  std::vector<double> features;  // rows x dim
  std::vector<double> targets;   // rows x classes, each row a distribution

  std::span<const double> row(std::size_t r) const {
    return {features.data() + r * dim, dim};
  }
  std::span<const double> target(std::size_t r) const {
    return {targets.data() + r * classes, classes};
  }
  void validate() const;
};

struct TrainConfig {
  double learning_rate = 1.0;
  int epochs = 300;
  int batch_size = 0;  // 0: full batch; otherwise sequential chunks
};

// Multinomial logistic regression with a bias column, trained by gradient
// descent on the soft cross-entropy from zero-initialized weights (so zero
// epochs means uniform predictions).
struct SoftmaxModel {
  std::size_t classes = 0;
  std::size_t dim = 0;
  std::vector<double> weights;  // classes x (dim + 1), bias last

  std::vector<double> predict(std::span<const double> x) const;
  std::size_t predict_class(std::span<const double> x) const;
};

struct TrainResult {
  SoftmaxModel model;
  std::vector<double> epoch_losses;  // loss after each epoch; front = initial
};

TrainResult train_softmax(const Dataset& data, const TrainConfig& config);

// Mean soft cross-entropy of the weight vector on the data; exposed together
// with its analytic gradient so tests can difference them.
double softmax_loss(const Dataset& data, std::span<const double> weights);
std::vector<double> softmax_loss_gradient(const Dataset& data,
                                          std::span<const double> weights);

}  // namespace rad
