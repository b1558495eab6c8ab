#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/softmax.hpp"

namespace rad {

// Gaussian class-blob classification task with disjoint labeled / pool /
// validation / test splits. Overlap (and with it the achievable teacher
// accuracy) is controlled by the distance between class means.
struct TaskConfig {
  std::size_t classes = 5;
  std::size_t dim = 4;
  std::size_t n_labeled = 300;
  std::size_t n_pool = 3000;
  std::size_t n_val = 500;
  std::size_t n_test = 2000;
  double separation = 2.0;   // class-mean norm; larger means less overlap
  double cov_lo = 0.6;       // per-class, per-axis standard deviations are
  double cov_hi = 1.4;       // drawn uniformly from this range
  // Nonzero: draw means/covariances from this seed instead of `seed`, fixing
  // the class geometry across replications (samples still vary per seed).
  std::uint64_t layout_seed = 0;
  // Below 1, the last two class means are pulled toward their midpoint by
  // this factor, planting one pair of structurally hard-to-separate classes.
  double hard_pair_scale = 1.0;
  std::uint64_t seed = 1;
};

struct SyntheticTask {
  TaskConfig config;
  std::vector<double> features;       // rows x dim, all splits concatenated
  std::vector<std::size_t> labels;    // groundtruth, hidden from strategies
  std::size_t labeled_begin = 0, labeled_end = 0;
  std::size_t pool_begin = 0, pool_end = 0;
  std::size_t val_begin = 0, val_end = 0;
  std::size_t test_begin = 0, test_end = 0;

  std::span<const double> row(std::size_t r) const {
    return {features.data() + r * config.dim, config.dim};
  }
  std::size_t rows() const { return labels.size(); }
};

SyntheticTask generate_task(const TaskConfig& config);

// Input transform applied before the linear model: per-coordinate
// standardization fitted on the given rows (the model's own training split),
// optionally preceded by a fixed random quadratic expansion that doubles the
// feature count (the teacher's capacity advantage).
struct FeatureMap {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::vector<std::size_t> quad_a, quad_b;  // empty: no expansion
  std::vector<double> mean, scale;

  std::vector<double> apply(std::span<const double> x) const;
};

FeatureMap make_feature_map(const SyntheticTask& task, std::size_t fit_begin,
                            std::size_t fit_end, bool quadratic, std::uint64_t seed);

// A feature map plus the linear model trained on top of it.
struct PipelineModel {
  FeatureMap features;
  SoftmaxModel model;

  std::vector<double> predict(std::span<const double> x) const {
    return model.predict(features.apply(x));
  }
  std::size_t predict_class(std::span<const double> x) const {
    return model.predict_class(features.apply(x));
  }
};

double accuracy_on(const PipelineModel& model, const SyntheticTask& task,
                   std::size_t begin, std::size_t end);

// Bisection on the class-mean separation until the teacher (trained on the
// labeled split) reaches the target test accuracy within tol. Returns the
// separation; the search is deterministic for a fixed config seed.
double calibrate_separation(TaskConfig config, double target_teacher_accuracy,
                            double tol, const TrainConfig& teacher_train,
                            bool teacher_quadratic);

// Train a pipeline (feature map + softmax regression) on the given rows of
// the task with one-hot targets.
PipelineModel train_pipeline(const SyntheticTask& task, std::size_t begin,
                             std::size_t end, const TrainConfig& config,
                             bool quadratic);

}  // namespace rad
