#include "core/distill_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "core/estimation.hpp"
#include "core/gains.hpp"
#include "core/json_canon.hpp"
#include "core/rng.hpp"
#include "core/sampling.hpp"

namespace rad {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Picks the positions of the `count` largest scores, ties by lower position.
std::vector<std::size_t> top_positions(const std::vector<double>& scores,
                                       std::size_t count) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  order.resize(std::min(count, order.size()));
  return order;
}

std::vector<std::size_t> uniform_positions(std::size_t pool_size, std::size_t count,
                                           std::uint64_t seed) {
  std::vector<double> p(pool_size, 1.0 / static_cast<double>(pool_size));
  const BatchPlan plan =
      plan_batch(p, static_cast<std::int64_t>(count), PlanMode::water_fill);
  return dep_round(plan.q, seed).indices;
}

}  // namespace

DistillTrace run_distillation(const DistillConfig& config) {
  require(!config.strategies.empty(), Errc::config_error, "no strategies configured");
  require(!config.seeds.empty(), Errc::config_error, "no seeds configured");
  require(config.iterations >= 0, Errc::config_error, "iterations must be non-negative");
  require(config.b >= 1, Errc::config_error, "batch size must be at least 1");
  require(static_cast<std::int64_t>(config.iterations) * config.b <=
              static_cast<std::int64_t>(config.task.n_pool),
          Errc::pool_exhausted, "iterations * b exceeds the pool");
  require(config.teacher_epoch_multiplier >= 1, Errc::config_error,
          "teacher epoch multiplier must be at least 1");

  const std::int64_t b_uniform = config.b_uniform >= 0
                                     ? std::min(config.b_uniform, config.b)
                                     : default_bootstrap_budget(config.b);

  DistillTrace trace;
  trace.config = config;
  trace.config_hash = canonical_hash(distill_config_to_json(config));

  std::vector<std::vector<double>> final_accuracy(config.strategies.size());
  double teacher_accuracy_sum = 0.0;

  for (std::uint64_t seed : config.seeds) {
    TaskConfig task_config = config.task;
    task_config.seed = derive_seed(seed, 0x7A5C);
    const SyntheticTask task = generate_task(task_config);

    TrainConfig teacher_train = config.student_train;
    teacher_train.epochs *= config.teacher_epoch_multiplier;
    const PipelineModel teacher =
        train_pipeline(task, task.labeled_begin, task.labeled_end, teacher_train,
                       config.teacher_quadratic_features);
    teacher_accuracy_sum += accuracy_on(teacher, task, task.test_begin, task.test_end);

    // Teacher argmax correctness over the pool drives realized-gain scoring;
    // it is never visible to a non-oracle strategy.
    const std::size_t pool_size = task.pool_end - task.pool_begin;
    std::vector<char> pool_mask(pool_size, 1);
    std::vector<std::vector<double>> pool_soft(pool_size);
    for (std::size_t t = 0; t < pool_size; ++t) {
      const std::size_t row = task.pool_begin + t;
      pool_soft[t] = teacher.predict(task.row(row));
      const std::size_t pred = static_cast<std::size_t>(
          std::max_element(pool_soft[t].begin(), pool_soft[t].end()) -
          pool_soft[t].begin());
      pool_mask[t] = pred == task.labels[row] ? 1 : 0;
    }

    // Teacher error rate from the validation split; the teacher is fixed, so
    // one estimate serves all iterations (m_hat scales with the live pool).
    std::vector<int> val_pred, val_true;
    for (std::size_t r = task.val_begin; r < task.val_end; ++r) {
      val_pred.push_back(static_cast<int>(teacher.predict_class(task.row(r))));
      val_true.push_back(static_cast<int>(task.labels[r]));
    }
    const MislabelEstimate base_estimate =
        estimate_m(val_pred, val_true, pool_size, config.delta);
    double err_rate = base_estimate.err_rate;
    if (config.shrink_epsilon) {
      err_rate = shrink_m(err_rate, *config.shrink_epsilon);
    }

    // The student may train on a labeled prefix only (handicap knob); its
    // feature map is fitted on that same prefix and fixed per task.
    const std::size_t labeled_count =
        config.student_labeled == 0
            ? task.labeled_end - task.labeled_begin
            : std::min(config.student_labeled, task.labeled_end - task.labeled_begin);
    const std::size_t student_labeled_end = task.labeled_begin + labeled_count;
    const FeatureMap student_features = make_feature_map(
        task, task.labeled_begin, student_labeled_end, false, task_config.seed);

    const auto retrain_student = [&](const std::vector<std::size_t>& acquired)
        -> SoftmaxModel {
      Dataset data;
      data.rows = labeled_count + acquired.size();
      data.dim = student_features.out_dim;
      data.classes = task.config.classes;
      data.features.reserve(data.rows * data.dim);
      data.targets.assign(data.rows * data.classes, 0.0);
      std::size_t r = 0;
      for (std::size_t row = task.labeled_begin; row < student_labeled_end; ++row, ++r) {
        const std::vector<double> x = student_features.apply(task.row(row));
        data.features.insert(data.features.end(), x.begin(), x.end());
        data.targets[r * data.classes + task.labels[row]] = 1.0;
      }
      for (std::size_t t : acquired) {
        const std::vector<double> x =
            student_features.apply(task.row(task.pool_begin + t));
        data.features.insert(data.features.end(), x.begin(), x.end());
        for (std::size_t c = 0; c < data.classes; ++c) {
          data.targets[r * data.classes + c] = pool_soft[t][c];
        }
        ++r;
      }
      return train_softmax(data, config.student_train).model;
    };

    for (std::size_t s = 0; s < config.strategies.size(); ++s) {
      const StrategyKind strategy = config.strategies[s];

      std::vector<std::size_t> remaining(pool_size);
      std::iota(remaining.begin(), remaining.end(), 0);
      std::vector<std::size_t> acquired;

      SoftmaxModel student = retrain_student(acquired);
      const auto student_accuracy = [&]() {
        std::size_t hits = 0;
        for (std::size_t r = task.test_begin; r < task.test_end; ++r) {
          const std::vector<double> p =
              student.predict(student_features.apply(task.row(r)));
          const std::size_t pred = static_cast<std::size_t>(
              std::max_element(p.begin(), p.end()) - p.begin());
          if (pred == task.labels[r]) ++hits;
        }
        return static_cast<double>(hits) /
               static_cast<double>(task.test_end - task.test_begin);
      };

      DistillIterRecord initial;
      initial.strategy = strategy;
      initial.seed = seed;
      initial.iteration = 0;
      initial.pool_remaining = remaining.size();
      initial.m_hat = err_rate * static_cast<double>(remaining.size());
      initial.w = 1.0 - err_rate;
      initial.test_accuracy = student_accuracy();
      initial.opt_value = kNan;
      initial.expected_payoff = kNan;
      trace.records.push_back(initial);

      for (int iter = 1; iter <= config.iterations; ++iter) {
        DistillIterRecord record;
        record.strategy = strategy;
        record.seed = seed;
        record.iteration = iter;
        record.pool_remaining = remaining.size();
        record.opt_value = kNan;
        record.expected_payoff = kNan;

        // Student predictions over the remaining pool.
        std::vector<double> margin_gains(remaining.size());
        std::vector<double> entropy_gains;
        if (strategy == StrategyKind::entropy_greedy) {
          entropy_gains.resize(remaining.size());
        }
        for (std::size_t t = 0; t < remaining.size(); ++t) {
          const std::vector<double> p = student.predict(
              student_features.apply(task.row(task.pool_begin + remaining[t])));
          margin_gains[t] = margin_gain(p);
          if (!entropy_gains.empty()) entropy_gains[t] = entropy_gain(p);
        }

        const double m_hat = err_rate * static_cast<double>(remaining.size());
        const double w = 1.0 - err_rate;
        record.m_hat = m_hat;
        record.w = w;

        const std::uint64_t pick_seed =
            derive_seed(seed, 0x100 + s * 1009 + static_cast<std::uint64_t>(iter));
        std::vector<std::size_t> picked;  // positions into `remaining`
        switch (strategy) {
          case StrategyKind::uniform:
            picked = uniform_positions(remaining.size(),
                                       static_cast<std::size_t>(config.b), pick_seed);
            break;
          case StrategyKind::margin_greedy:
            picked = top_positions(margin_gains, static_cast<std::size_t>(config.b));
            break;
          case StrategyKind::entropy_greedy:
            picked = top_positions(entropy_gains, static_cast<std::size_t>(config.b));
            break;
          case StrategyKind::oracle_robust: {
            std::vector<double> scores(margin_gains);
            for (std::size_t t = 0; t < remaining.size(); ++t) {
              if (!pool_mask[remaining[t]]) scores[t] = -1.0;  // may read the mask
            }
            picked = top_positions(scores, static_cast<std::size_t>(config.b));
            break;
          }
          case StrategyKind::rad: {
            std::int64_t solver_budget = config.b;
            if (iter == 1 && b_uniform > 0) {
              picked = uniform_positions(remaining.size(),
                                         static_cast<std::size_t>(b_uniform),
                                         derive_seed(pick_seed, 0xB0));
              solver_budget = config.b - b_uniform;
            }
            if (solver_budget > 0) {
              GainVector eligible = GainVector::from_raw(margin_gains);
              record.filtered_out = eligible.excluded_index.size();
              if (eligible.eligible_count() == 0) {
                // Fully confident student: no informative points remain, so
                // spend the rest of the budget uniformly.
                const std::vector<std::size_t> extra = uniform_positions(
                    remaining.size(), static_cast<std::size_t>(config.b),
                    derive_seed(pick_seed, 0xB1));
                for (std::size_t t : extra) {
                  if (static_cast<std::int64_t>(picked.size()) >= config.b) break;
                  if (std::find(picked.begin(), picked.end(), t) == picked.end()) {
                    picked.push_back(t);
                  }
                }
              } else {
                const double n_eligible =
                    static_cast<double>(eligible.eligible_count());
                const double m_solve =
                    std::min(m_hat, std::max(0.0, 0.999 * (n_eligible - 1.0)));
                const double w_solve = default_w(m_solve, eligible.eligible_count());
                const SamplerSolution solution =
                    solve_relative(margin_gains, m_solve, w_solve);
                record.opt_value = solution.opt_value;

                std::vector<double> probs = solution.probs;
                // Zero out anything already taken by the bootstrap picks.
                if (!picked.empty()) {
                  double kept = 0.0;
                  for (std::size_t t : picked) probs[t] = 0.0;
                  for (double p : probs) kept += p;
                  require(kept > 0.0, Errc::internal, "support exhausted by bootstrap");
                  for (double& p : probs) p /= kept;
                }
                const BatchPlan plan =
                    plan_batch(probs, solver_budget, PlanMode::water_fill);
                const BatchSample sample =
                    dep_round(plan.q, derive_seed(pick_seed, 0xB2));
                picked.insert(picked.end(), sample.indices.begin(),
                              sample.indices.end());

                double expected = 0.0;
                for (std::size_t t = 0; t < remaining.size(); ++t) {
                  const double g = margin_gains[t];
                  expected += solution.probs[t] *
                              (pool_mask[remaining[t]] ? g : -w * g);
                }
                record.expected_payoff = expected;
              }
            }
            break;
          }
        }

        // Score against the groundtruth-derived mask with margin gains; the
        // soft labels themselves are appended and the student retrained.
        double realized = 0.0;
        for (std::size_t t : picked) {
          const double g = margin_gains[t];
          realized += pool_mask[remaining[t]] ? g : -w * g;
        }
        record.realized_gain = realized;
        record.queried = picked.size();

        std::vector<std::size_t> picked_pool;
        picked_pool.reserve(picked.size());
        for (std::size_t t : picked) picked_pool.push_back(remaining[t]);
        acquired.insert(acquired.end(), picked_pool.begin(), picked_pool.end());

        std::sort(picked.rbegin(), picked.rend());
        for (std::size_t t : picked) {
          remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(t));
        }

        student = retrain_student(acquired);
        record.test_accuracy = student_accuracy();
        trace.records.push_back(std::move(record));
      }

      final_accuracy[s].push_back(student_accuracy());
    }
  }

  trace.mean_teacher_accuracy =
      teacher_accuracy_sum / static_cast<double>(config.seeds.size());

  for (std::size_t s = 0; s < config.strategies.size(); ++s) {
    DistillStrategySummary summary;
    summary.strategy = config.strategies[s];
    const auto& xs = final_accuracy[s];
    const double n = static_cast<double>(xs.size());
    summary.mean_final_accuracy = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    if (xs.size() > 1) {
      double ss = 0.0;
      for (double x : xs) {
        ss += (x - summary.mean_final_accuracy) * (x - summary.mean_final_accuracy);
      }
      summary.stderr_final_accuracy = std::sqrt(ss / (n - 1.0) / n);
    }
    trace.summary.push_back(summary);
  }
  return trace;
}

DistillConfig parse_distill_config(const nlohmann::json& doc) {
  require(doc.is_object(), Errc::config_error, "config must be a JSON object");
  require(doc.value("schema_version", 0) == 1, Errc::config_error,
          "unsupported schema_version");
  DistillConfig config;
  try {
    const auto& task = doc.at("task");
    config.task.classes = task.value("classes", config.task.classes);
    config.task.dim = task.value("dim", config.task.dim);
    config.task.n_labeled = task.value("n_labeled", config.task.n_labeled);
    config.task.n_pool = task.value("n_pool", config.task.n_pool);
    config.task.n_val = task.value("n_val", config.task.n_val);
    config.task.n_test = task.value("n_test", config.task.n_test);
    config.task.separation = task.value("separation", config.task.separation);
    config.task.cov_lo = task.value("cov_lo", config.task.cov_lo);
    config.task.cov_hi = task.value("cov_hi", config.task.cov_hi);
    config.task.layout_seed = task.value("layout_seed", config.task.layout_seed);
    config.task.hard_pair_scale =
        task.value("hard_pair_scale", config.task.hard_pair_scale);

    for (const auto& s : doc.at("strategies")) {
      config.strategies.push_back(strategy_from_name(s.get<std::string>()));
    }
    config.iterations = doc.at("iterations").get<int>();
    config.b = doc.at("b").get<std::int64_t>();
    config.b_uniform = doc.value("b_uniform", std::int64_t{-1});
    config.delta = doc.value("delta", 0.05);
    if (doc.contains("shrink_epsilon") && !doc.at("shrink_epsilon").is_null()) {
      config.shrink_epsilon = doc.at("shrink_epsilon").get<double>();
    }
    if (doc.contains("student")) {
      const auto& student = doc.at("student");
      config.student_train.learning_rate =
          student.value("learning_rate", config.student_train.learning_rate);
      config.student_train.epochs = student.value("epochs", config.student_train.epochs);
      config.student_train.batch_size =
          student.value("batch_size", config.student_train.batch_size);
      config.student_labeled = student.value("labeled", config.student_labeled);
    }
    if (doc.contains("teacher")) {
      const auto& teacher = doc.at("teacher");
      config.teacher_epoch_multiplier =
          teacher.value("epoch_multiplier", config.teacher_epoch_multiplier);
      config.teacher_quadratic_features =
          teacher.value("quadratic_features", config.teacher_quadratic_features);
    }
    for (const auto& s : doc.at("seeds")) {
      config.seeds.push_back(s.get<std::uint64_t>());
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::config_error, std::string("bad distill config: ") + e.what());
  }
  return config;
}

nlohmann::json distill_config_to_json(const DistillConfig& config) {
  nlohmann::json task{{"classes", config.task.classes},
                      {"dim", config.task.dim},
                      {"n_labeled", config.task.n_labeled},
                      {"n_pool", config.task.n_pool},
                      {"n_val", config.task.n_val},
                      {"n_test", config.task.n_test},
                      {"separation", config.task.separation},
                      {"cov_lo", config.task.cov_lo},
                      {"cov_hi", config.task.cov_hi},
                      {"layout_seed", config.task.layout_seed},
                      {"hard_pair_scale", config.task.hard_pair_scale}};
  auto strategies = nlohmann::json::array();
  for (StrategyKind s : config.strategies) strategies.push_back(strategy_name(s));
  nlohmann::json doc{{"schema_version", 1},
                     {"task", task},
                     {"strategies", strategies},
                     {"iterations", config.iterations},
                     {"b", config.b},
                     {"b_uniform", config.b_uniform},
                     {"delta", config.delta},
                     {"student",
                      {{"learning_rate", config.student_train.learning_rate},
                       {"epochs", config.student_train.epochs},
                       {"batch_size", config.student_train.batch_size},
                       {"labeled", config.student_labeled}}},
                     {"teacher",
                      {{"epoch_multiplier", config.teacher_epoch_multiplier},
                       {"quadratic_features", config.teacher_quadratic_features}}},
                     {"seeds", config.seeds}};
  if (config.shrink_epsilon) doc["shrink_epsilon"] = *config.shrink_epsilon;
  return doc;
}

nlohmann::json distill_trace_to_json(const DistillTrace& trace) {
  auto records = nlohmann::json::array();
  for (const DistillIterRecord& r : trace.records) {
    nlohmann::json item;
    item["strategy"] = strategy_name(r.strategy);
    item["seed"] = r.seed;
    item["iteration"] = r.iteration;
    item["queried"] = r.queried;
    item["pool_remaining"] = r.pool_remaining;
    item["m_hat"] = r.m_hat;
    item["w"] = r.w;
    item["realized_gain"] = r.realized_gain;
    item["test_accuracy"] = r.test_accuracy;
    item["filtered_out"] = r.filtered_out;
    if (!std::isnan(r.opt_value)) item["opt_value"] = r.opt_value;
    if (!std::isnan(r.expected_payoff)) item["expected_payoff"] = r.expected_payoff;
    records.push_back(std::move(item));
  }
  auto summary = nlohmann::json::array();
  for (const DistillStrategySummary& s : trace.summary) {
    summary.push_back({{"strategy", strategy_name(s.strategy)},
                       {"mean_final_accuracy", s.mean_final_accuracy},
                       {"stderr_final_accuracy", s.stderr_final_accuracy}});
  }
  return nlohmann::json{{"schema_version", 1},
                        {"kind", "distill_trace"},
                        {"config", distill_config_to_json(trace.config)},
                        {"config_hash", trace.config_hash},
                        {"mean_teacher_accuracy", trace.mean_teacher_accuracy},
                        {"records", records},
                        {"summary", summary}};
}

std::string distill_trace_to_csv(const DistillTrace& trace) {
  std::string csv =
      "strategy,seed,iteration,queried,pool_remaining,m_hat,w,realized_gain,"
      "test_accuracy,opt_value,expected_payoff\n";
  char buf[320];
  for (const DistillIterRecord& r : trace.records) {
    std::snprintf(buf, sizeof(buf), "%s,%llu,%d,%zu,%zu,%.17g,%.17g,%.17g,%.17g,",
                  strategy_name(r.strategy), static_cast<unsigned long long>(r.seed),
                  r.iteration, r.queried, r.pool_remaining, r.m_hat, r.w,
                  r.realized_gain, r.test_accuracy);
    csv += buf;
    if (std::isnan(r.opt_value)) {
      csv += ",";
    } else {
      std::snprintf(buf, sizeof(buf), "%.17g,", r.opt_value);
      csv += buf;
    }
    if (std::isnan(r.expected_payoff)) {
      csv += "\n";
    } else {
      std::snprintf(buf, sizeof(buf), "%.17g\n", r.expected_payoff);
      csv += buf;
    }
  }
  return csv;
}

}  // namespace rad
