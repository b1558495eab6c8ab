#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/game_sim.hpp"
#include "core/task.hpp"

namespace rad {

// Desk-scale active distillation: a softmax-regression teacher is trained
// once on the labeled split; per iteration each strategy queries b pool
// points for teacher soft labels and the student is retrained from scratch
// on the labeled split plus everything acquired so far.
struct DistillConfig {
  TaskConfig task;
  std::vector<StrategyKind> strategies;
  int iterations = 5;
  std::int64_t b = 200;
  std::int64_t b_uniform = -1;  // -1: max(100, ceil(0.1 b)), capped at b
  double delta = 0.05;          // failure probability for the m estimate
  std::optional<double> shrink_epsilon;  // m_tilde = m_hat / (1 + eps)
  TrainConfig student_train{1.0, 300, 0};
  int teacher_epoch_multiplier = 4;
  bool teacher_quadratic_features = true;
  // Optional handicap widening the teacher-student gap: the student trains on
  // only this many labeled points (0 = all of them). The teacher always sees
  // the full labeled split.
  std::size_t student_labeled = 0;
  std::vector<std::uint64_t> seeds;
};

struct DistillIterRecord {
  StrategyKind strategy;
  std::uint64_t seed = 0;
  int iteration = 0;            // 0 is the pre-acquisition student
  std::size_t queried = 0;      // batch size actually queried this iteration
  std::size_t pool_remaining = 0;
  double m_hat = 0.0;           // estimated mislabels over the remaining pool
  double w = 0.0;               // scoring / solver weight (1 - estimated rate)
  double realized_gain = 0.0;   // margin-gain payoff against the true mask
  double test_accuracy = 0.0;
  std::size_t filtered_out = 0;  // pool points with ineligible (zero) gain
  // rad only (NaN otherwise)
  double opt_value = 0.0;
  double expected_payoff = 0.0;
};

struct DistillStrategySummary {
  StrategyKind strategy;
  double mean_final_accuracy = 0.0;
  double stderr_final_accuracy = 0.0;
};

struct DistillTrace {
  DistillConfig config;
  std::string config_hash;
  double mean_teacher_accuracy = 0.0;
  std::vector<DistillIterRecord> records;
  std::vector<DistillStrategySummary> summary;
};

DistillTrace run_distillation(const DistillConfig& config);

DistillConfig parse_distill_config(const nlohmann::json& doc);
nlohmann::json distill_config_to_json(const DistillConfig& config);
nlohmann::json distill_trace_to_json(const DistillTrace& trace);
std::string distill_trace_to_csv(const DistillTrace& trace);

}  // namespace rad
