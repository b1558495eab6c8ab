#include "core/game_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "core/rng.hpp"
#include "core/sampling.hpp"

namespace rad {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct MeanStderr {
  double mean = 0.0;
  double se = 0.0;
};

MeanStderr mean_stderr(const std::vector<double>& xs) {
  MeanStderr out;
  if (xs.empty()) return out;
  const double n = static_cast<double>(xs.size());
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

// Indices of remaining points ordered by descending gain, ties by index.
std::vector<std::size_t> by_descending_gain(const std::vector<double>& gains,
                                            const std::vector<std::size_t>& pool) {
  std::vector<std::size_t> order = pool;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return gains[a] > gains[b];
  });
  return order;
}

// Exactly floor(m) mislabels on the front of `order`, one more with
// probability frac(m).
void place_adversarial_mislabels(std::vector<char>& correct,
                                 const std::vector<std::size_t>& order, double m,
                                 Rng& rng) {
  const auto whole = static_cast<std::size_t>(std::floor(m));
  const double frac = m - static_cast<double>(whole);
  const std::size_t limit = std::min(whole, order.size());
  for (std::size_t r = 0; r < limit; ++r) correct[order[r]] = 0;
  if (frac > 0.0 && limit < order.size() && rng.bernoulli(frac)) {
    correct[order[limit]] = 0;
  }
}

}  // namespace

const char* strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::uniform: return "uniform";
    case StrategyKind::margin_greedy: return "margin_greedy";
    case StrategyKind::entropy_greedy: return "entropy_greedy";
    case StrategyKind::rad: return "rad";
    case StrategyKind::oracle_robust: return "oracle_robust";
  }
  return "unknown";
}

StrategyKind strategy_from_name(const std::string& name) {
  if (name == "uniform") return StrategyKind::uniform;
  if (name == "margin_greedy") return StrategyKind::margin_greedy;
  if (name == "entropy_greedy") return StrategyKind::entropy_greedy;
  if (name == "rad") return StrategyKind::rad;
  if (name == "oracle_robust") return StrategyKind::oracle_robust;
  fail(Errc::config_error, "unknown strategy: " + name);
}

GameTrace run_game(const GameConfig& config) {
  require(config.n >= 1, Errc::config_error, "pool must be non-empty");
  require(config.b >= 1, Errc::config_error, "batch size must be at least 1");
  require(config.rounds >= 1, Errc::config_error, "need at least one round");
  require(!config.strategies.empty(), Errc::config_error, "no strategies configured");
  require(!config.seeds.empty(), Errc::config_error, "no seeds configured");
  require(config.m >= 0.0 && config.m < static_cast<double>(config.n),
          Errc::config_error, "adversary budget must lie in [0, n)");
  require(static_cast<std::int64_t>(config.rounds) * config.b <=
              static_cast<std::int64_t>(config.n),
          Errc::budget_exhausted, "rounds * b exceeds the pool");
  const auto last_round_pool = static_cast<double>(
      static_cast<std::int64_t>(config.n) -
      static_cast<std::int64_t>(config.rounds - 1) * config.b);
  require(config.m < last_round_pool, Errc::config_error,
          "adversary budget must stay below the final-round pool");

  GameTrace trace;
  trace.config = config;
  const double w = config.zero_loss
                       ? 0.0
                       : config.loss_weight.value_or(default_w(config.m, config.n));
  require(w >= 0.0 && w <= 1.0, Errc::invalid_weight, "loss weight must lie in [0,1]");
  trace.resolved_w = w;

  const auto loss_of = [&](double gain) { return config.zero_loss ? 0.0 : w * gain; };

  std::vector<std::vector<double>> final_cumulative(config.strategies.size());
  std::vector<std::vector<double>> first_round(config.strategies.size());

  for (std::uint64_t seed : config.seeds) {
    // The gain vector and oblivious worlds are fixed per seed and shared by
    // all strategies; only selection randomness differs per strategy.
    Rng gains_rng(derive_seed(seed, 1));
    std::vector<double> gains(config.n);
    for (double& g : gains) g = gains_rng.uniform(config.gain_lo, config.gain_hi);

    std::vector<char> oblivious_mask(config.n, 1);
    {
      Rng mask_rng(derive_seed(seed, 2));
      switch (config.world.kind) {
        case WorldKind::adversarial_top_gain: {
          std::vector<std::size_t> all(config.n);
          std::iota(all.begin(), all.end(), 0);
          place_adversarial_mislabels(oblivious_mask, by_descending_gain(gains, all),
                                      config.m, mask_rng);
          break;
        }
        case WorldKind::iid:
          for (std::size_t i = 0; i < config.n; ++i) {
            if (mask_rng.bernoulli(config.world.rate)) oblivious_mask[i] = 0;
          }
          break;
        case WorldKind::gain_correlated:
          for (std::size_t i = 0; i < config.n; ++i) {
            const double rate = std::clamp(config.world.slope * gains[i], 0.0, 1.0);
            if (mask_rng.bernoulli(rate)) oblivious_mask[i] = 0;
          }
          break;
        case WorldKind::adversarial_vs_p:
          break;  // decided per round, after seeing the distribution
      }
    }

    for (std::size_t s = 0; s < config.strategies.size(); ++s) {
      const StrategyKind strategy = config.strategies[s];
      std::vector<std::size_t> pool(config.n);
      std::iota(pool.begin(), pool.end(), 0);
      double cumulative = 0.0;

      for (int round = 1; round <= config.rounds; ++round) {
        const std::uint64_t round_salt =
            0x100 + static_cast<std::uint64_t>(s) * 1009 + static_cast<std::uint64_t>(round);

        GameRoundRecord record;
        record.strategy = strategy;
        record.seed = seed;
        record.round = round;
        record.n_remaining = pool.size();
        record.opt_value = kNan;
        record.expected_payoff = kNan;

        // Selection. Distribution strategies realize exactly b picks through
        // water-fill planning and dependent rounding; greedy strategies pick
        // deterministically.
        std::vector<double> pool_probs;  // distribution over pool positions
        std::vector<std::size_t> picked_positions;
        SamplerSolution rad_solution;

        switch (strategy) {
          case StrategyKind::uniform: {
            pool_probs.assign(pool.size(), 1.0 / static_cast<double>(pool.size()));
            break;
          }
          case StrategyKind::margin_greedy:
          case StrategyKind::entropy_greedy: {
            std::vector<std::size_t> positions(pool.size());
            std::iota(positions.begin(), positions.end(), 0);
            std::stable_sort(positions.begin(), positions.end(),
                             [&](std::size_t a, std::size_t b) {
                               return gains[pool[a]] > gains[pool[b]];
                             });
            positions.resize(static_cast<std::size_t>(config.b));
            picked_positions = positions;
            break;
          }
          case StrategyKind::rad: {
            std::vector<double> pool_gains(pool.size());
            for (std::size_t t = 0; t < pool.size(); ++t) pool_gains[t] = gains[pool[t]];
            if (config.zero_loss) {
              rad_solution = solve_general(
                  RobustInstance::make(pool_gains, LossModel::zero(), config.m));
            } else {
              rad_solution = solve_relative(pool_gains, config.m, w);
            }
            pool_probs = rad_solution.probs;
            record.opt_value = rad_solution.opt_value;
            break;
          }
          case StrategyKind::oracle_robust: {
            // Needs the mask; resolved below once the round mask is known.
            break;
          }
        }

        // Fix the round's correctness mask over pool positions.
        std::vector<char> mask(pool.size(), 1);
        if (config.world.kind == WorldKind::adversarial_vs_p) {
          Rng mask_rng(derive_seed(seed, 0x9000 + round_salt));
          // Rank remaining points by p_i (g_i + l_i); deterministic picks are
          // treated as the uniform distribution over the picked set.
          std::vector<double> weighted(pool.size(), 0.0);
          if (!pool_probs.empty()) {
            for (std::size_t t = 0; t < pool.size(); ++t) {
              weighted[t] = pool_probs[t] * (gains[pool[t]] + loss_of(gains[pool[t]]));
            }
          } else {
            for (std::size_t t : picked_positions) {
              weighted[t] = (gains[pool[t]] + loss_of(gains[pool[t]])) /
                            static_cast<double>(picked_positions.size());
            }
          }
          std::vector<std::size_t> order(pool.size());
          std::iota(order.begin(), order.end(), 0);
          std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return weighted[a] > weighted[b];
          });
          const double budget = std::min(config.m, static_cast<double>(pool.size()));
          const auto whole = static_cast<std::size_t>(std::floor(budget));
          for (std::size_t r = 0; r < whole; ++r) mask[order[r]] = 0;
          const double frac = budget - static_cast<double>(whole);
          if (frac > 0.0 && whole < pool.size() && mask_rng.bernoulli(frac)) {
            mask[order[whole]] = 0;
          }
        } else {
          for (std::size_t t = 0; t < pool.size(); ++t) mask[t] = oblivious_mask[pool[t]];
        }

        if (strategy == StrategyKind::oracle_robust) {
          // Highest gains among correctly labeled points; if fewer than b are
          // correct, fill with the lowest-loss mislabeled points.
          std::vector<std::size_t> correct_pos, wrong_pos;
          for (std::size_t t = 0; t < pool.size(); ++t) {
            (mask[t] ? correct_pos : wrong_pos).push_back(t);
          }
          std::stable_sort(correct_pos.begin(), correct_pos.end(),
                           [&](std::size_t a, std::size_t b) {
                             return gains[pool[a]] > gains[pool[b]];
                           });
          std::stable_sort(wrong_pos.begin(), wrong_pos.end(),
                           [&](std::size_t a, std::size_t b) {
                             return loss_of(gains[pool[a]]) < loss_of(gains[pool[b]]);
                           });
          for (std::size_t t : correct_pos) {
            if (picked_positions.size() == static_cast<std::size_t>(config.b)) break;
            picked_positions.push_back(t);
          }
          for (std::size_t t : wrong_pos) {
            if (picked_positions.size() == static_cast<std::size_t>(config.b)) break;
            picked_positions.push_back(t);
          }
        }

        if (picked_positions.empty()) {
          const BatchPlan plan = plan_batch(pool_probs, config.b, PlanMode::water_fill);
          const BatchSample sample = dep_round(plan.q, derive_seed(seed, round_salt));
          picked_positions = sample.indices;
        }

        if (strategy == StrategyKind::rad) {
          double expected = 0.0;
          for (std::size_t t = 0; t < pool.size(); ++t) {
            const double g = gains[pool[t]];
            const double l = loss_of(g);
            expected += pool_probs[t] * (mask[t] ? g : -l);
          }
          record.expected_payoff = expected;
        }

        double realized = 0.0;
        for (std::size_t t : picked_positions) {
          const double g = gains[pool[t]];
          realized += mask[t] ? g : -loss_of(g);
          record.selected.push_back(pool[t]);
        }
        std::sort(record.selected.begin(), record.selected.end());
        cumulative += realized;
        record.realized_gain = realized;
        record.cumulative_gain = cumulative;
        trace.rounds.push_back(std::move(record));

        // Remove the selection from the pool (descending positions).
        std::sort(picked_positions.rbegin(), picked_positions.rend());
        for (std::size_t t : picked_positions) {
          pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(t));
        }

        if (round == 1) first_round[s].push_back(realized);
      }
      final_cumulative[s].push_back(cumulative);
    }
  }

  for (std::size_t s = 0; s < config.strategies.size(); ++s) {
    GameStrategySummary summary;
    summary.strategy = config.strategies[s];
    const MeanStderr cum = mean_stderr(final_cumulative[s]);
    const MeanStderr first = mean_stderr(first_round[s]);
    summary.mean_cumulative = cum.mean;
    summary.stderr_cumulative = cum.se;
    summary.mean_first_round = first.mean;
    summary.stderr_first_round = first.se;
    trace.summary.push_back(summary);
  }
  return trace;
}

GameConfig parse_game_config(const nlohmann::json& doc) {
  require(doc.is_object(), Errc::config_error, "config must be a JSON object");
  require(doc.value("schema_version", 0) == 1, Errc::config_error,
          "unsupported schema_version");
  GameConfig config;
  try {
    config.n = doc.at("n").get<std::size_t>();
    config.m = doc.at("m").get<double>();
    config.b = doc.at("b").get<std::int64_t>();
    config.rounds = doc.at("rounds").get<int>();

    const auto& loss = doc.at("loss");
    const std::string kind = loss.at("kind").get<std::string>();
    if (kind == "zero") {
      config.zero_loss = true;
    } else if (kind == "relative") {
      config.zero_loss = false;
      if (loss.contains("w") && !loss.at("w").is_null()) {
        config.loss_weight = loss.at("w").get<double>();
      }
    } else {
      fail(Errc::config_error, "game loss kind must be zero or relative");
    }

    const auto& world = doc.at("world");
    const std::string world_kind = world.at("kind").get<std::string>();
    if (world_kind == "adversarial_top_gain") {
      config.world.kind = WorldKind::adversarial_top_gain;
    } else if (world_kind == "adversarial_vs_p") {
      config.world.kind = WorldKind::adversarial_vs_p;
    } else if (world_kind == "iid") {
      config.world.kind = WorldKind::iid;
      config.world.rate = world.at("rate").get<double>();
    } else if (world_kind == "gain_correlated") {
      config.world.kind = WorldKind::gain_correlated;
      config.world.slope = world.at("slope").get<double>();
    } else {
      fail(Errc::config_error, "unknown world kind: " + world_kind);
    }

    for (const auto& s : doc.at("strategies")) {
      config.strategies.push_back(strategy_from_name(s.get<std::string>()));
    }
    for (const auto& s : doc.at("seeds")) {
      config.seeds.push_back(s.get<std::uint64_t>());
    }
    if (doc.contains("gains")) {
      config.gain_lo = doc.at("gains").value("lo", 0.01);
      config.gain_hi = doc.at("gains").value("hi", 1.0);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::config_error, std::string("bad game config: ") + e.what());
  }
  return config;
}

namespace {

nlohmann::json world_to_json(const WorldConfig& world) {
  nlohmann::json out;
  switch (world.kind) {
    case WorldKind::adversarial_top_gain: out["kind"] = "adversarial_top_gain"; break;
    case WorldKind::adversarial_vs_p: out["kind"] = "adversarial_vs_p"; break;
    case WorldKind::iid:
      out["kind"] = "iid";
      out["rate"] = world.rate;
      break;
    case WorldKind::gain_correlated:
      out["kind"] = "gain_correlated";
      out["slope"] = world.slope;
      break;
  }
  return out;
}

}  // namespace

nlohmann::json game_trace_to_json(const GameTrace& trace) {
  nlohmann::json config;
  config["schema_version"] = 1;
  config["n"] = trace.config.n;
  config["m"] = trace.config.m;
  config["b"] = trace.config.b;
  config["rounds"] = trace.config.rounds;
  config["loss"] = trace.config.zero_loss
                       ? nlohmann::json{{"kind", "zero"}}
                       : nlohmann::json{{"kind", "relative"}, {"w", trace.resolved_w}};
  config["world"] = world_to_json(trace.config.world);
  config["gains"] = {{"lo", trace.config.gain_lo}, {"hi", trace.config.gain_hi}};
  auto strategies = nlohmann::json::array();
  for (StrategyKind s : trace.config.strategies) strategies.push_back(strategy_name(s));
  config["strategies"] = strategies;
  config["seeds"] = trace.config.seeds;

  auto rounds = nlohmann::json::array();
  for (const GameRoundRecord& r : trace.rounds) {
    nlohmann::json item;
    item["strategy"] = strategy_name(r.strategy);
    item["seed"] = r.seed;
    item["round"] = r.round;
    item["n_remaining"] = r.n_remaining;
    item["selected"] = r.selected;
    item["realized_gain"] = r.realized_gain;
    item["cumulative_gain"] = r.cumulative_gain;
    if (!std::isnan(r.opt_value)) item["opt_value"] = r.opt_value;
    if (!std::isnan(r.expected_payoff)) item["expected_payoff"] = r.expected_payoff;
    rounds.push_back(std::move(item));
  }

  auto summary = nlohmann::json::array();
  for (const GameStrategySummary& s : trace.summary) {
    summary.push_back({{"strategy", strategy_name(s.strategy)},
                       {"mean_cumulative_gain", s.mean_cumulative},
                       {"stderr_cumulative_gain", s.stderr_cumulative},
                       {"mean_first_round_gain", s.mean_first_round},
                       {"stderr_first_round_gain", s.stderr_first_round}});
  }

  return nlohmann::json{{"schema_version", 1},
                        {"kind", "game_trace"},
                        {"config", config},
                        {"rounds", rounds},
                        {"summary", summary}};
}

std::string game_trace_to_csv(const GameTrace& trace) {
  std::string csv =
      "strategy,seed,round,n_remaining,realized_gain,cumulative_gain,opt_value,"
      "expected_payoff\n";
  char buf[256];
  for (const GameRoundRecord& r : trace.rounds) {
    std::snprintf(buf, sizeof(buf), "%s,%llu,%d,%zu,%.17g,%.17g,", strategy_name(r.strategy),
                  static_cast<unsigned long long>(r.seed), r.round, r.n_remaining,
                  r.realized_gain, r.cumulative_gain);
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
