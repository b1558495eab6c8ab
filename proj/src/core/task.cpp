#include "core/task.hpp"

#include <algorithm>
#include <cmath>

#include "core/rng.hpp"

namespace rad {

SyntheticTask generate_task(const TaskConfig& config) {
  require(config.classes >= 2, Errc::config_error, "need at least 2 classes");
  require(config.dim >= 2, Errc::config_error, "need at least 2 dimensions");
  require(config.n_labeled >= 1 && config.n_pool >= 1 && config.n_val >= 1 &&
              config.n_test >= 1,
          Errc::config_error, "all split sizes must be positive");
  require(config.separation > 0.0 && config.cov_lo > 0.0 &&
              config.cov_hi >= config.cov_lo,
          Errc::config_error, "bad blob geometry");
  require(config.hard_pair_scale > 0.0 && config.hard_pair_scale <= 1.0,
          Errc::config_error, "hard_pair_scale must lie in (0, 1]");

  const std::uint64_t geometry_seed =
      config.layout_seed != 0 ? config.layout_seed : config.seed;
  Rng geometry_rng(derive_seed(geometry_seed, 0xA11));
  Rng rng(derive_seed(config.seed, 0xA12));

  // Class means: random directions scaled to the separation radius.
  std::vector<double> means(config.classes * config.dim);
  for (std::size_t c = 0; c < config.classes; ++c) {
    double norm = 0.0;
    for (std::size_t j = 0; j < config.dim; ++j) {
      means[c * config.dim + j] = geometry_rng.normal();
      norm += means[c * config.dim + j] * means[c * config.dim + j];
    }
    norm = std::sqrt(norm);
    for (std::size_t j = 0; j < config.dim; ++j) {
      means[c * config.dim + j] *= config.separation / norm;
    }
  }

  // Optionally collapse the last two means toward their midpoint, making that
  // class pair intrinsically hard regardless of the global separation.
  if (config.hard_pair_scale < 1.0 && config.classes >= 2) {
    const std::size_t a = (config.classes - 2) * config.dim;
    const std::size_t b = (config.classes - 1) * config.dim;
    for (std::size_t j = 0; j < config.dim; ++j) {
      const double center = 0.5 * (means[a + j] + means[b + j]);
      const double half = 0.5 * (means[a + j] - means[b + j]) * config.hard_pair_scale;
      means[a + j] = center + half;
      means[b + j] = center - half;
    }
  }

  // Per-class anisotropic (diagonal) spread; gives the quadratic feature
  // expansion genuine signal to pick up.
  std::vector<double> sigmas(config.classes * config.dim);
  for (double& s : sigmas) s = geometry_rng.uniform(config.cov_lo, config.cov_hi);

  const std::size_t total =
      config.n_labeled + config.n_pool + config.n_val + config.n_test;

  SyntheticTask task;
  task.config = config;
  task.features.resize(total * config.dim);
  task.labels.resize(total);
  for (std::size_t r = 0; r < total; ++r) {
    const auto label = static_cast<std::size_t>(rng.uniform_index(config.classes));
    task.labels[r] = label;
    for (std::size_t j = 0; j < config.dim; ++j) {
      task.features[r * config.dim + j] =
          means[label * config.dim + j] + sigmas[label * config.dim + j] * rng.normal();
    }
  }

  task.labeled_begin = 0;
  task.labeled_end = config.n_labeled;
  task.pool_begin = task.labeled_end;
  task.pool_end = task.pool_begin + config.n_pool;
  task.val_begin = task.pool_end;
  task.val_end = task.val_begin + config.n_val;
  task.test_begin = task.val_end;
  task.test_end = task.test_begin + config.n_test;
  return task;
}

std::vector<double> FeatureMap::apply(std::span<const double> x) const {
  std::vector<double> out(out_dim);
  for (std::size_t j = 0; j < in_dim; ++j) out[j] = x[j];
  for (std::size_t q = 0; q < quad_a.size(); ++q) {
    out[in_dim + q] = x[quad_a[q]] * x[quad_b[q]];
  }
  for (std::size_t j = 0; j < out_dim; ++j) {
    out[j] = (out[j] - mean[j]) / scale[j];
  }
  return out;
}

FeatureMap make_feature_map(const SyntheticTask& task, std::size_t fit_begin,
                            std::size_t fit_end, bool quadratic, std::uint64_t seed) {
  require(fit_end > fit_begin && fit_end <= task.rows(), Errc::out_of_range,
          "bad feature-fit range");
  const std::size_t d = task.config.dim;
  FeatureMap map;
  map.in_dim = d;
  map.out_dim = quadratic ? 2 * d : d;
  if (quadratic) {
    // Half squares, half cross products: squares carry the per-class variance
    // signal of axis-aligned blobs, cross terms the second-moment structure.
    Rng rng(derive_seed(seed, 0xFEA7));
    for (std::size_t q = 0; q < d; ++q) {
      const auto a = static_cast<std::size_t>(rng.uniform_index(d));
      const auto b = rng.bernoulli(0.5) ? a : static_cast<std::size_t>(rng.uniform_index(d));
      map.quad_a.push_back(a);
      map.quad_b.push_back(b);
    }
  }

  // Standardization statistics from the fit rows only.
  map.mean.assign(map.out_dim, 0.0);
  map.scale.assign(map.out_dim, 1.0);
  const std::size_t n = fit_end - fit_begin;
  std::vector<double> raw(map.out_dim);
  std::vector<double> sum(map.out_dim, 0.0), sum_sq(map.out_dim, 0.0);
  for (std::size_t r = fit_begin; r < fit_end; ++r) {
    const std::span<const double> x = task.row(r);
    for (std::size_t j = 0; j < d; ++j) raw[j] = x[j];
    for (std::size_t q = 0; q < map.quad_a.size(); ++q) {
      raw[d + q] = x[map.quad_a[q]] * x[map.quad_b[q]];
    }
    for (std::size_t j = 0; j < map.out_dim; ++j) {
      sum[j] += raw[j];
      sum_sq[j] += raw[j] * raw[j];
    }
  }
  for (std::size_t j = 0; j < map.out_dim; ++j) {
    map.mean[j] = sum[j] / static_cast<double>(n);
    const double var =
        std::max(sum_sq[j] / static_cast<double>(n) - map.mean[j] * map.mean[j], 1e-12);
    map.scale[j] = std::sqrt(var);
  }
  return map;
}

double accuracy_on(const PipelineModel& model, const SyntheticTask& task,
                   std::size_t begin, std::size_t end) {
  require(end > begin && end <= task.rows(), Errc::out_of_range, "bad split range");
  std::size_t hits = 0;
  for (std::size_t r = begin; r < end; ++r) {
    if (model.predict_class(task.row(r)) == task.labels[r]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(end - begin);
}

PipelineModel train_pipeline(const SyntheticTask& task, std::size_t begin,
                             std::size_t end, const TrainConfig& config,
                             bool quadratic) {
  PipelineModel pipeline;
  pipeline.features = make_feature_map(task, begin, end, quadratic, task.config.seed);

  Dataset data;
  data.rows = end - begin;
  data.dim = pipeline.features.out_dim;
  data.classes = task.config.classes;
  data.features.reserve(data.rows * data.dim);
  data.targets.assign(data.rows * data.classes, 0.0);
  for (std::size_t r = begin; r < end; ++r) {
    const std::vector<double> x = pipeline.features.apply(task.row(r));
    data.features.insert(data.features.end(), x.begin(), x.end());
    data.targets[(r - begin) * data.classes + task.labels[r]] = 1.0;
  }

  pipeline.model = train_softmax(data, config).model;
  return pipeline;
}

double calibrate_separation(TaskConfig config, double target_teacher_accuracy,
                            double tol, const TrainConfig& teacher_train,
                            bool teacher_quadratic) {
  require(target_teacher_accuracy > 1.0 / static_cast<double>(config.classes) &&
              target_teacher_accuracy < 1.0,
          Errc::config_error, "target accuracy must beat chance and stay below 1");
  require(tol > 0.0, Errc::config_error, "tolerance must be positive");

  // Average a few probe replications so the returned separation centers the
  // across-seed mean rather than one draw.
  const std::uint64_t base_seed = config.seed;
  const auto teacher_accuracy = [&](double separation) {
    config.separation = separation;
    double total = 0.0;
    for (std::uint64_t probe = 1; probe <= 3; ++probe) {
      config.seed = derive_seed(base_seed, probe);
      const SyntheticTask task = generate_task(config);
      const PipelineModel teacher = train_pipeline(
          task, task.labeled_begin, task.labeled_end, teacher_train, teacher_quadratic);
      total += accuracy_on(teacher, task, task.test_begin, task.test_end);
    }
    return total / 3.0;
  };

  double lo = 0.05, hi = 16.0;
  for (int iter = 0; iter < 40; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double acc = teacher_accuracy(mid);
    if (std::fabs(acc - target_teacher_accuracy) <= tol * 0.5) return mid;
    if (acc > target_teacher_accuracy) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace rad
