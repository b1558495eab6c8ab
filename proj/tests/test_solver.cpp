#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/oracle.hpp"
#include "core/rng.hpp"
#include "core/solver.hpp"

using namespace rad;

namespace {

RobustInstance explicit_instance(std::vector<double> gains, std::vector<double> losses,
                                 double m) {
  return RobustInstance::make(gains, LossModel::explicit_values(std::move(losses)), m);
}

double support_weighted_mass(const RobustInstance& instance,
                             const SamplerSolution& solution, std::size_t rank) {
  const std::size_t i = solution.sort_perm[rank];
  double gain = 0.0;
  for (std::size_t pos = 0; pos < instance.gains.values.size(); ++pos) {
    if (instance.gains.original_index[pos] == i) gain = instance.gains.values[pos];
  }
  return solution.probs[i] * (gain + instance.loss_at(i, gain));
}

}  // namespace

TEST_CASE("zero budget selects the single best point") {
  for (const LossModel& losses :
       {LossModel::zero(), LossModel::relative(0.7),
        LossModel::explicit_values({0.3, 0.9})}) {
    RobustInstance instance;
    instance.gains = GainVector::from_raw(std::vector<double>{0.9, 0.5});
    instance.losses = losses;
    instance.adversary_budget = 0.0;
    const SamplerSolution solution = solve_general(instance);
    CHECK(solution.k_star == 1);
    CHECK(solution.probs[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(solution.probs[1] == 0.0);
    CHECK(solution.opt_value == doctest::Approx(0.9).epsilon(1e-12));
    CHECK_FALSE(solution.should_abstain);
  }
}

TEST_CASE("three-point instance with explicit losses") {
  // Cross-checked against the simplex grid oracle below before freezing.
  const RobustInstance instance =
      explicit_instance({0.8, 0.5, 0.4}, {0.2, 0.1, 0.6}, 1.0);
  const SamplerSolution solution = solve_general(instance);
  CHECK(solution.k_star == 3);
  CHECK(solution.probs[0] == doctest::Approx(0.272727272727).epsilon(1e-9));
  CHECK(solution.probs[1] == doctest::Approx(0.454545454545).epsilon(1e-9));
  CHECK(solution.probs[2] == doctest::Approx(0.272727272727).epsilon(1e-9));
  CHECK(solution.opt_value == doctest::Approx(0.2818181818).epsilon(1e-9));

  const OracleResult oracle = grid_oracle(instance, 0.01);
  const double lipschitz = 1.0;  // max(g + l)
  CHECK(oracle.best_value <= solution.opt_value + 1e-10);
  CHECK(solution.opt_value <=
        oracle.best_value + lipschitz * 0.01 * std::sqrt(3.0));
}

TEST_CASE("symmetric two-point game splits evenly") {
  const RobustInstance instance = explicit_instance({1.0, 1.0}, {0.0, 0.0}, 1.0);
  const SamplerSolution solution = solve_general(instance);
  CHECK(solution.k_star == 2);
  CHECK(solution.probs[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(solution.probs[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(solution.opt_value == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("relative solve matches its closed form") {
  const SamplerSolution solution = solve_relative(std::vector<double>{0.9, 0.6, 0.3}, 1.0, 0.5);
  CHECK(solution.k_star == 3);
  CHECK(solution.probs[0] == doctest::Approx(0.18181818).epsilon(1e-7));
  CHECK(solution.probs[1] == doctest::Approx(0.27272727).epsilon(1e-7));
  CHECK(solution.probs[2] == doctest::Approx(0.54545454).epsilon(1e-7));
  CHECK(solution.opt_value == doctest::Approx(0.24545454).epsilon(1e-7));

  // Same instance through the oracle route.
  const RobustInstance instance = RobustInstance::make(
      std::vector<double>{0.9, 0.6, 0.3}, LossModel::relative(0.5), 1.0);
  const OracleResult oracle = grid_oracle(instance, 0.01);
  CHECK(oracle.best_value <= solution.opt_value + 1e-10);
  CHECK(solution.opt_value <= oracle.best_value + 1.35 * 0.01 * std::sqrt(3.0));
}

TEST_CASE("equal gains spread uniformly under the largest-k tie break") {
  for (double w : {0.0, 0.3, 1.0}) {
    const std::vector<double> gains(17, 0.42);
    const SamplerSolution solution = solve_relative(gains, 0.0, w);
    CHECK(solution.k_star == 17);
    for (double p : solution.probs) {
      CHECK(p == doctest::Approx(1.0 / 17).epsilon(1e-12));
    }
    CHECK(solution.opt_value == doctest::Approx(0.42).epsilon(1e-12));
  }
}

TEST_CASE("relative zero-loss symmetric case") {
  const SamplerSolution solution = solve_relative(std::vector<double>{1.0, 1.0}, 1.0, 0.0);
  CHECK(solution.probs[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(solution.opt_value == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("default_w") {
  CHECK(default_w(0.0, 10) == doctest::Approx(1.0));
  CHECK(default_w(5.0, 10) == doctest::Approx(0.5));
  // m = 0.05 n keeps w at 0.95 regardless of n.
  for (std::size_t n : {20UL, 400UL, 10000UL}) {
    CHECK(default_w(0.05 * static_cast<double>(n), n) == doctest::Approx(0.95));
  }
  CHECK_THROWS_AS(default_w(-1.0, 10), Error);
  CHECK_THROWS_AS(default_w(10.0, 10), Error);
}

TEST_CASE("default_w keeps the game value non-negative") {
  Rng rng(7011);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(60);
    std::vector<double> gains(n);
    for (double& g : gains) g = rng.uniform(0.01, 1.0);
    const double m = rng.uniform(0.0, static_cast<double>(n) * 0.95);
    const SamplerSolution solution = solve_relative(gains, m, default_w(m, n));
    CHECK(solution.opt_value >= -1e-12);
    CHECK_FALSE(solution.should_abstain);
  }
}

TEST_CASE("game_value reductions") {
  const RobustInstance instance = explicit_instance({0.8, 0.5, 0.4}, {0.2, 0.1, 0.6}, 0.0);
  // m = 0: plain expected gain.
  const std::vector<double> p{0.2, 0.3, 0.5};
  CHECK(game_value(instance, p) ==
        doctest::Approx(0.2 * 0.8 + 0.3 * 0.5 + 0.5 * 0.4).epsilon(1e-12));

  // Point mass with m >= 1: the adversary mislabels the only supported point.
  const RobustInstance one = explicit_instance({0.8, 0.5, 0.4}, {0.2, 0.1, 0.6}, 1.0);
  CHECK(game_value(one, std::vector<double>{0.0, 1.0, 0.0}) ==
        doctest::Approx(-0.1).epsilon(1e-12));

  // The solver's distribution achieves exactly its claimed value.
  const SamplerSolution solution = solve_relative(std::vector<double>{0.9, 0.6, 0.3}, 1.0, 0.5);
  const RobustInstance rel = RobustInstance::make(
      std::vector<double>{0.9, 0.6, 0.3}, LossModel::relative(0.5), 1.0);
  CHECK(game_value(rel, solution.probs) ==
        doctest::Approx(solution.opt_value).epsilon(1e-10));
}

TEST_CASE("game_value handles fractional budgets") {
  const RobustInstance instance = explicit_instance({1.0, 0.5}, {0.0, 0.0}, 0.5);
  // p = (1/3, 2/3) equalizes; removing half the largest mass leaves 0.5.
  const std::vector<double> p{1.0 / 3.0, 2.0 / 3.0};
  CHECK(game_value(instance, p) == doctest::Approx(0.5).epsilon(1e-12));
  // The worst-case mask is consistent with the value.
  const std::vector<double> mask = worst_case_mask(instance, p);
  CHECK(expected_payoff(instance, p, mask) ==
        doctest::Approx(game_value(instance, p)).epsilon(1e-12));
  // mask mass = n - m
  CHECK(std::accumulate(mask.begin(), mask.end(), 0.0) ==
        doctest::Approx(2.0 - 0.5).epsilon(1e-12));
}

TEST_CASE("solution invariants on random instances") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    LossPolicy loss_policy;
    switch (seed % 3) {
      case 0: loss_policy.kind = LossPolicy::Kind::zero; break;
      case 1: loss_policy.kind = LossPolicy::Kind::relative; break;
      default: loss_policy.kind = LossPolicy::Kind::explicit_uniform; break;
    }
    MPolicy m_policy;
    m_policy.integer = seed % 2 == 0;
    const RobustInstance instance =
        random_instance(derive_seed(9001, seed), 2, 120, m_policy, loss_policy);
    const SamplerSolution solution = solve_general(instance);

    // Probabilities form a distribution supported on the top-k_star gains.
    double total = 0.0;
    std::size_t positive = 0;
    for (double p : solution.probs) {
      CHECK(p >= 0.0);
      total += p;
      if (p > 0.0) ++positive;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(positive == solution.k_star);

    // Equalization of p_i (g_i + l_i) across the support.
    const double first = support_weighted_mass(instance, solution, 0);
    for (std::size_t r = 1; r < solution.k_star; ++r) {
      CHECK(support_weighted_mass(instance, solution, r) ==
            doctest::Approx(first).epsilon(1e-10));
    }

    // Sandwich: g_(k*) >= opt >= g_(k*+1), reading gains in sorted order.
    std::vector<double> sorted(instance.gains.values);
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    CHECK(sorted[solution.k_star - 1] >= solution.opt_value - 1e-10);
    const double next =
        solution.k_star < sorted.size() ? sorted[solution.k_star] : 0.0;
    if (!solution.should_abstain) {
      CHECK(solution.opt_value >= next - 1e-10);
    }

    // Achieved value matches the claim.
    CHECK(game_value(instance, solution.probs) ==
          doctest::Approx(solution.opt_value)
              .epsilon(1e-10 * std::max(1.0, std::fabs(solution.opt_value))));
  }
}

TEST_CASE("opt_value is non-increasing in the adversary budget") {
  Rng rng(511);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + rng.uniform_index(40);
    std::vector<double> gains(n), losses(n);
    for (double& g : gains) g = rng.uniform(0.01, 1.0);
    for (double& l : losses) l = rng.uniform(0.0, 1.0);
    double previous = std::numeric_limits<double>::infinity();
    for (double frac = 0.0; frac < 0.95; frac += 0.1) {
      const double m = frac * static_cast<double>(n);
      const SamplerSolution solution =
          solve_general(explicit_instance(gains, losses, m));
      CHECK(solution.opt_value <= previous + 1e-10);
      previous = solution.opt_value;
    }
  }
}

TEST_CASE("scaling gains and losses rescales the value only") {
  Rng rng(512);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(30);
    std::vector<double> gains(n), losses(n);
    for (double& g : gains) g = rng.uniform(0.01, 1.0);
    for (double& l : losses) l = rng.uniform(0.0, 1.0);
    const double m = rng.uniform(0.0, 0.8 * static_cast<double>(n));
    const double lambda = rng.uniform(0.1, 50.0);

    const SamplerSolution base = solve_general(explicit_instance(gains, losses, m));
    std::vector<double> gains_scaled(gains), losses_scaled(losses);
    for (double& g : gains_scaled) g *= lambda;
    for (double& l : losses_scaled) l *= lambda;
    const SamplerSolution scaled =
        solve_general(explicit_instance(gains_scaled, losses_scaled, m));

    CHECK(scaled.k_star == base.k_star);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(scaled.probs[i] == doctest::Approx(base.probs[i]).epsilon(1e-10));
    }
    CHECK(scaled.opt_value ==
          doctest::Approx(lambda * base.opt_value).epsilon(1e-10));

    // Same statement under a fixed relative weight.
    const double w = rng.uniform(0.0, 1.0);
    const SamplerSolution rel_base = solve_relative(gains, m, w);
    const SamplerSolution rel_scaled = solve_relative(gains_scaled, m, w);
    CHECK(rel_scaled.k_star == rel_base.k_star);
    CHECK(rel_scaled.opt_value ==
          doctest::Approx(lambda * rel_base.opt_value).epsilon(1e-10));
  }
}

TEST_CASE("solve_relative reduces to solve_general with explicit w*g losses") {
  Rng rng(513);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(50);
    std::vector<double> gains(n);
    for (double& g : gains) g = rng.uniform(0.01, 1.0);
    const double w = rng.uniform(0.0, 1.0);
    const double m = rng.uniform(0.0, 0.4 * static_cast<double>(n));

    const SamplerSolution relative = solve_relative(gains, m, w);
    std::vector<double> losses(n);
    for (std::size_t i = 0; i < n; ++i) losses[i] = w * gains[i];
    const SamplerSolution general = solve_general(explicit_instance(gains, losses, m));

    CHECK(relative.k_star == general.k_star);
    CHECK(relative.opt_value == doctest::Approx(general.opt_value).epsilon(1e-12));
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(relative.probs[i] == doctest::Approx(general.probs[i]).epsilon(1e-12));
    }
    CHECK(relative.sort_perm == general.sort_perm);
  }
}

TEST_CASE("zero budget with a unique maximum recovers greedy selection") {
  Rng rng(514);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(40);
    std::vector<double> gains(n);
    for (double& g : gains) g = rng.uniform(0.01, 0.9);
    const std::size_t best = rng.uniform_index(n);
    gains[best] = 0.95 + rng.uniform(0.0, 0.05);  // strict unique max
    const SamplerSolution solution =
        solve_general(RobustInstance::make(gains, LossModel::zero(), 0.0));
    CHECK(solution.k_star == 1);
    CHECK(solution.probs[best] == 1.0);
    CHECK(solution.opt_value == doctest::Approx(gains[best]).epsilon(1e-12));
  }
}

TEST_CASE("abstain flag on negative game values") {
  // Heavy symmetric losses push every prefix ratio negative.
  const RobustInstance instance = explicit_instance({1.0, 1.0}, {9.0, 9.0}, 1.0);
  const SamplerSolution solution = solve_general(instance);
  CHECK(solution.should_abstain);
  CHECK(solution.k_star == 2);  // all-negative ratios rise with k
  CHECK(solution.opt_value == doctest::Approx(-4.0).epsilon(1e-12));
  CHECK(game_value(instance, solution.probs) ==
        doctest::Approx(-4.0).epsilon(1e-12));
}

TEST_CASE("eligibility filtering") {
  const std::vector<double> gains{0.5, 0.0, 0.25, 1e-15};
  const RobustInstance instance = RobustInstance::make(gains, LossModel::zero(), 1.0);
  CHECK(instance.eligible_count() == 2);
  CHECK(instance.total_points() == 4);
  const SamplerSolution solution = solve_general(instance);
  CHECK(solution.probs.size() == 4);
  CHECK(solution.probs[1] == 0.0);
  CHECK(solution.probs[3] == 0.0);
  CHECK(solution.probs[0] + solution.probs[2] == doctest::Approx(1.0));
}

TEST_CASE("solver input validation") {
  CHECK_THROWS_AS(RobustInstance::make(std::vector<double>{}, LossModel::zero(), 0.0),
                  Error);
  CHECK_THROWS_AS(RobustInstance::make(std::vector<double>{1e-15}, LossModel::zero(), 0.0),
                  Error);
  CHECK_THROWS_AS(RobustInstance::make(std::vector<double>{0.5}, LossModel::zero(), -0.1),
                  Error);
  CHECK_THROWS_AS(RobustInstance::make(std::vector<double>{0.5}, LossModel::zero(), 1.0),
                  Error);
  CHECK_THROWS_AS(
      RobustInstance::make(std::vector<double>{0.5, NAN}, LossModel::zero(), 0.0), Error);
  CHECK_THROWS_AS(solve_relative(std::vector<double>{0.5, 0.2}, 0.5, 1.5), Error);
  CHECK_THROWS_AS(solve_relative(std::vector<double>{0.5, 0.2}, 0.5, -0.1), Error);
  CHECK_THROWS_AS(LossModel::explicit_values({-0.1}), Error);

  const RobustInstance instance = explicit_instance({0.5, 0.2}, {0.0, 0.0}, 1.0);
  CHECK_THROWS_AS(game_value(instance, std::vector<double>{0.5}), Error);
  CHECK_THROWS_AS(game_value(instance, std::vector<double>{0.9, 0.2}), Error);
  CHECK_THROWS_AS(game_value(instance, std::vector<double>{1.1, -0.1}), Error);
}
