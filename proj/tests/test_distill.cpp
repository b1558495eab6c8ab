#include <doctest.h>

#include <cmath>
#include <set>

#include "core/distill_sim.hpp"
#include "core/json_canon.hpp"

using namespace rad;

namespace {

DistillConfig tiny_config() {
  DistillConfig config;
  config.task.classes = 3;
  config.task.dim = 3;
  config.task.n_labeled = 120;
  config.task.n_pool = 600;
  config.task.n_val = 200;
  config.task.n_test = 400;
  config.task.separation = 2.0;
  config.strategies = {StrategyKind::rad};
  config.iterations = 2;
  config.b = 60;
  config.b_uniform = 20;
  config.student_train.epochs = 120;
  config.seeds = {5};
  return config;
}

}  // namespace

TEST_CASE("zero iterations trace only the initial student") {
  DistillConfig config = tiny_config();
  config.iterations = 0;
  const DistillTrace trace = run_distillation(config);
  REQUIRE(trace.records.size() == 1);
  CHECK(trace.records[0].iteration == 0);
  CHECK(trace.records[0].queried == 0);
  CHECK(trace.records[0].test_accuracy >= 0.0);
  CHECK(trace.records[0].test_accuracy <= 1.0);
}

TEST_CASE("queried batches are disjoint and bounded by the budget") {
  DistillConfig config = tiny_config();
  config.strategies = {StrategyKind::rad, StrategyKind::uniform,
                       StrategyKind::margin_greedy, StrategyKind::entropy_greedy,
                       StrategyKind::oracle_robust};
  const DistillTrace trace = run_distillation(config);
  std::size_t total = 0;
  for (const DistillIterRecord& r : trace.records) {
    if (r.iteration == 0) continue;
    CHECK(r.queried <= static_cast<std::size_t>(config.b));
    total += r.queried;
  }
  CHECK(total <= config.strategies.size() *
                     static_cast<std::size_t>(config.iterations * config.b));
}

TEST_CASE("pool accounting matches the acquisition schedule") {
  const DistillConfig config = tiny_config();
  const DistillTrace trace = run_distillation(config);
  REQUIRE(trace.records.size() == 3);  // iterations 0, 1, 2
  CHECK(trace.records[1].pool_remaining == config.task.n_pool);
  CHECK(trace.records[2].pool_remaining ==
        config.task.n_pool - static_cast<std::size_t>(config.b));
}

TEST_CASE("rad records a non-negative game value and a dominating payoff") {
  DistillConfig config = tiny_config();
  config.seeds = {5, 6, 7, 8, 9, 10};
  const DistillTrace trace = run_distillation(config);
  // Expected single-pick payoff against the groundtruth mask, relative to the
  // solve's game value: non-negative in the mean up to estimation noise.
  std::vector<double> slack;
  for (const DistillIterRecord& r : trace.records) {
    if (r.iteration == 0 || std::isnan(r.opt_value)) continue;
    CHECK(r.opt_value >= -1e-12);
    CHECK(r.filtered_out == 0);
    slack.push_back(r.expected_payoff - r.opt_value);
  }
  REQUIRE(slack.size() > 4);
  double mean = 0.0;
  for (double s : slack) mean += s;
  mean /= static_cast<double>(slack.size());
  double ss = 0.0;
  for (double s : slack) ss += (s - mean) * (s - mean);
  const double se = std::sqrt(ss / static_cast<double>(slack.size() - 1) /
                              static_cast<double>(slack.size()));
  CHECK(mean >= -3.0 * se);
}

TEST_CASE("distillation traces replay byte-for-byte") {
  const DistillConfig config = tiny_config();
  const std::string a = dump_canonical(distill_trace_to_json(run_distillation(config)));
  const std::string b = dump_canonical(distill_trace_to_json(run_distillation(config)));
  CHECK(a == b);
}

TEST_CASE("pool exhaustion is rejected up front") {
  DistillConfig config = tiny_config();
  config.iterations = 20;  // 20 * 60 > 600
  CHECK_THROWS_AS(run_distillation(config), Error);
}

TEST_CASE("distill config round-trips through JSON") {
  const DistillConfig config = tiny_config();
  const nlohmann::json doc = distill_config_to_json(config);
  const DistillConfig parsed = parse_distill_config(doc);
  CHECK(parsed.task.n_pool == config.task.n_pool);
  CHECK(parsed.iterations == config.iterations);
  CHECK(parsed.b == config.b);
  CHECK(parsed.b_uniform == config.b_uniform);
  CHECK(parsed.strategies == config.strategies);
  CHECK(parsed.seeds == config.seeds);
  CHECK(dump_canonical(distill_config_to_json(parsed)) == dump_canonical(doc));
}

TEST_CASE("near-perfect teacher keeps every strategy close") {
  DistillConfig config = tiny_config();
  config.task.separation = 10.0;  // almost no teacher noise
  config.strategies = {StrategyKind::uniform, StrategyKind::rad};
  config.seeds = {3, 4, 5};
  const DistillTrace trace = run_distillation(config);
  REQUIRE(trace.summary.size() == 2);
  CHECK(trace.mean_teacher_accuracy >= 0.95);
  const double gap = std::fabs(trace.summary[0].mean_final_accuracy -
                               trace.summary[1].mean_final_accuracy);
  CHECK(gap <= 0.05);
}
