#include "core/oracle.hpp"

#include <cmath>
#include <limits>

#include "core/rng.hpp"

namespace rad {

std::uint64_t simplex_grid_size(std::uint64_t ticks, std::size_t n) {
  // C(ticks + n - 1, n - 1)
  std::uint64_t result = 1;
  for (std::size_t i = 1; i < n; ++i) {
    result = result * (ticks + i) / i;
  }
  return result;
}

OracleResult grid_oracle(const RobustInstance& instance, double step) {
  instance.validate();
  const std::size_t n = instance.total_points();
  require(n <= 4, Errc::too_large, "grid oracle is limited to n <= 4");
  require(step > 0.0 && step <= 0.1, Errc::invalid_step, "step must lie in (0, 0.1]");

  const auto ticks = static_cast<std::uint64_t>(std::llround(1.0 / step));

  OracleResult result;
  result.grid_step = step;
  result.best_value = -std::numeric_limits<double>::infinity();

  std::vector<std::uint64_t> counts(n, 0);
  std::vector<double> p(n, 0.0);

  // Enumerate all compositions of `ticks` into n non-negative parts.
  const auto evaluate = [&]() {
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = static_cast<double>(counts[i]) / static_cast<double>(ticks);
    }
    const double value = game_value(instance, p);
    ++result.evaluations;
    if (value > result.best_value) {
      result.best_value = value;
      result.best_p = p;
    }
  };

  const auto recurse = [&](auto&& self, std::size_t coord, std::uint64_t left) -> void {
    if (coord + 1 == n) {
      counts[coord] = left;
      evaluate();
      return;
    }
    for (std::uint64_t c = 0; c <= left; ++c) {
      counts[coord] = c;
      self(self, coord + 1, left - c);
    }
  };
  recurse(recurse, 0, ticks);
  return result;
}

RobustInstance random_instance(std::uint64_t seed, std::size_t n_lo, std::size_t n_hi,
                               const MPolicy& m_policy, const LossPolicy& loss_policy,
                               double gain_lo, double gain_hi) {
  require(n_lo >= 1 && n_hi >= n_lo, Errc::out_of_range, "empty size range");
  require(m_policy.fraction_lo >= 0.0 && m_policy.fraction_hi < 1.0 &&
              m_policy.fraction_lo <= m_policy.fraction_hi,
          Errc::out_of_range, "budget fraction must lie in [0, 1)");

  Rng rng(seed);
  const std::size_t n =
      n_lo + static_cast<std::size_t>(rng.uniform_index(n_hi - n_lo + 1));

  std::vector<double> gains(n);
  for (double& g : gains) g = rng.uniform(gain_lo, gain_hi);

  LossModel losses;
  switch (loss_policy.kind) {
    case LossPolicy::Kind::zero:
      losses = LossModel::zero();
      break;
    case LossPolicy::Kind::relative:
      losses = LossModel::relative(rng.uniform(loss_policy.w_lo, loss_policy.w_hi));
      break;
    case LossPolicy::Kind::explicit_uniform: {
      std::vector<double> values(n);
      for (double& l : values) l = rng.uniform(loss_policy.loss_lo, loss_policy.loss_hi);
      losses = LossModel::explicit_values(std::move(values));
      break;
    }
  }

  // Draw the budget as a fraction of G_n = sum g/(g+l). This respects the
  // standing feasibility assumption G_n >= m under every loss policy, and
  // reduces to a plain fraction of n for zero losses (G_n = n there).
  RobustInstance probe;
  probe.gains = GainVector::from_raw(gains);
  probe.losses = losses;
  double g_total = 0.0;
  for (std::size_t pos = 0; pos < probe.gains.values.size(); ++pos) {
    const double g = probe.gains.values[pos];
    const double l = probe.loss_at(probe.gains.original_index[pos], g);
    g_total += g / (g + l);
  }

  const double fraction = rng.uniform(m_policy.fraction_lo, m_policy.fraction_hi);
  double m = fraction * g_total;
  if (m_policy.integer) m = std::floor(m);

  probe.adversary_budget = m;
  probe.validate();
  return probe;
}

}  // namespace rad
