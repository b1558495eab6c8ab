#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/solver.hpp"

namespace rad {

// How the hidden correctness mask is generated. Adversarial worlds place
// exactly floor(m) mislabels (plus one more with probability frac(m));
// stochastic worlds draw independent Bernoulli masks.
enum class WorldKind {
  adversarial_top_gain,  // mislabel the m highest-gain points, fixed up front
  adversarial_vs_p,      // mislabel the m largest p_i (g_i + l_i) after seeing p
  iid,                   // mislabel each point independently with `rate`
  gain_correlated,       // mislabel probability clamp(slope * g_i, 0, 1)
};

struct WorldConfig {
  WorldKind kind = WorldKind::iid;
  double rate = 0.0;   // iid
  double slope = 0.0;  // gain_correlated
};

// Selection policies compared in the game. Only oracle_robust may read the
// mask. entropy_greedy is listed for configuration parity with the
// distillation simulator; over abstract gains it selects exactly like
// margin_greedy (both are top-gain greedy).
enum class StrategyKind { uniform, margin_greedy, entropy_greedy, rad, oracle_robust };

const char* strategy_name(StrategyKind kind);
StrategyKind strategy_from_name(const std::string& name);

struct GameConfig {
  std::size_t n = 0;
  double m = 0.0;
  // Scoring losses: zero or relative. A missing weight means default_w(m, n).
  bool zero_loss = false;
  std::optional<double> loss_weight;
  std::int64_t b = 1;
  int rounds = 1;
  WorldConfig world;
  std::vector<StrategyKind> strategies;
  std::vector<std::uint64_t> seeds;
  double gain_lo = 0.01;
  double gain_hi = 1.0;
};

struct GameRoundRecord {
  StrategyKind strategy;
  std::uint64_t seed = 0;
  int round = 0;
  std::size_t n_remaining = 0;  // pool size before this round's selection
  std::vector<std::size_t> selected;
  double realized_gain = 0.0;
  double cumulative_gain = 0.0;
  // rad only (NaN otherwise): closed-form game value of this round's solve
  // and the expected single-pick payoff against the round's realized mask.
  double opt_value = 0.0;
  double expected_payoff = 0.0;
};

struct GameStrategySummary {
  StrategyKind strategy;
  double mean_cumulative = 0.0;
  double stderr_cumulative = 0.0;
  double mean_first_round = 0.0;
  double stderr_first_round = 0.0;
};

struct GameTrace {
  GameConfig config;
  double resolved_w = 0.0;  // scoring weight actually used (0 for zero loss)
  std::vector<GameRoundRecord> rounds;
  std::vector<GameStrategySummary> summary;
};

GameTrace run_game(const GameConfig& config);

GameConfig parse_game_config(const nlohmann::json& doc);
nlohmann::json game_trace_to_json(const GameTrace& trace);
std::string game_trace_to_csv(const GameTrace& trace);

}  // namespace rad
