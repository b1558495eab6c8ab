#include "core/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "core/rng.hpp"

namespace rad {
namespace {

constexpr double kSettleEps = 1e-9;  // inputs this close to 0/1 are settled

void check_inclusion_probs(std::span<const double> q) {
  for (double x : q) {
    require(std::isfinite(x), Errc::non_finite_input, "inclusion probabilities must be finite");
    require(x >= -1e-12 && x <= 1.0 + 1e-12, Errc::out_of_range,
            "inclusion probabilities must lie in [0,1]");
  }
}

void check_distribution(std::span<const double> p) {
  double total = 0.0;
  for (double x : p) {
    require(std::isfinite(x), Errc::non_finite_input, "probabilities must be finite");
    require(x >= -1e-12, Errc::not_a_distribution, "negative probability");
    total += x;
  }
  require(std::fabs(total - 1.0) <= 1e-9, Errc::not_a_distribution,
          "probabilities must sum to 1");
}

}  // namespace

BatchPlan plan_batch(std::span<const double> probs, std::int64_t b, PlanMode mode) {
  require(b >= 1, Errc::invalid_batch, "batch size must be at least 1");
  check_distribution(probs);

  BatchPlan plan;
  plan.target = b;
  plan.mode = mode;
  plan.q.assign(probs.begin(), probs.end());

  if (mode == PlanMode::paper_cap) {
    for (double& x : plan.q) x = std::min(static_cast<double>(b) * std::max(x, 0.0), 1.0);
  } else {
    std::size_t support = 0;
    for (double x : probs) {
      if (x > 0.0) ++support;
    }
    const double budget = static_cast<double>(
        std::min<std::int64_t>(b, static_cast<std::int64_t>(support)));

    // Cap saturated entries at 1 and spread the leftover budget over the
    // rest in proportion to p, until no new entry saturates.
    std::vector<bool> capped(probs.size(), false);
    for (;;) {
      double capped_count = 0.0;
      double open_mass = 0.0;
      for (std::size_t i = 0; i < probs.size(); ++i) {
        if (capped[i]) {
          capped_count += 1.0;
        } else {
          open_mass += std::max(probs[i], 0.0);
        }
      }
      const double remaining = budget - capped_count;
      bool saturated = false;
      for (std::size_t i = 0; i < probs.size(); ++i) {
        if (capped[i]) {
          plan.q[i] = 1.0;
        } else if (probs[i] <= 0.0 || open_mass <= 0.0) {
          plan.q[i] = 0.0;
        } else {
          plan.q[i] = remaining * probs[i] / open_mass;
          if (plan.q[i] >= 1.0) {
            capped[i] = true;
            saturated = true;
          }
        }
      }
      if (!saturated) break;
    }
  }

  double total = 0.0;
  for (double x : plan.q) total += x;
  plan.effective_total = total;
  return plan;
}

std::int64_t max_safe_batch(std::span<const double> probs) {
  check_distribution(probs);
  double max_p = 0.0;
  for (double x : probs) max_p = std::max(max_p, x);
  require(max_p > 0.0, Errc::not_a_distribution, "distribution has no positive entry");
  const double inv = 1.0 / max_p;
  auto b = static_cast<std::int64_t>(std::floor(inv));
  // 1/p computed in floating point may land just below an attainable integer.
  if (static_cast<double>(b + 1) * max_p <= 1.0 + 1e-12) ++b;
  return std::max<std::int64_t>(b, 1);
}

namespace detail {

PairStep dep_round_step(double pi, double pj, double u) {
  const double alpha = std::min(1.0 - pi, pj);
  const double beta = std::min(pi, 1.0 - pj);
  const double sum = pi + pj;
  // One branch pushes pi up by alpha, the other down by beta; the saturating
  // coordinate is written as an exact 0 or 1 and its partner as sum minus
  // that bound, so the pair total carries no extra rounding.
  if (u < beta / (alpha + beta)) {
    if (1.0 - pi <= pj) return {1.0, sum - 1.0};
    return {sum, 0.0};
  }
  if (pi <= 1.0 - pj) return {0.0, sum};
  return {sum - 1.0, 1.0};
}

}  // namespace detail

BatchSample dep_round(std::span<const double> q, std::uint64_t seed) {
  check_inclusion_probs(q);
  double total = 0.0;
  for (double x : q) total += x;
  const double rounded = std::round(total);
  require(std::fabs(total - rounded) <= 1e-9, Errc::non_integral_total,
          "inclusion probabilities must sum to an integer");

  std::vector<double> p(q.begin(), q.end());
  const auto fractional = [&](std::size_t i) {
    return p[i] > kSettleEps && p[i] < 1.0 - kSettleEps;
  };

  const auto next_fractional = [&](std::size_t from) {
    std::size_t k = from;
    while (k < p.size() && !fractional(k)) ++k;
    return k;
  };

  Rng rng(seed);
  std::size_t i = next_fractional(0);
  std::size_t j = i < p.size() ? next_fractional(i + 1) : p.size();
  while (j < p.size()) {
    const detail::PairStep step = detail::dep_round_step(p[i], p[j], rng.uniform01());
    p[i] = step.first;
    p[j] = step.second;
    // Every step settles at least one side of the pair.
    if (fractional(i)) {
      j = next_fractional(j + 1);
    } else if (fractional(j)) {
      i = j;
      j = next_fractional(j + 1);
    } else {
      i = next_fractional(j + 1);
      j = i < p.size() ? next_fractional(i + 1) : p.size();
    }
  }

  BatchSample sample;
  sample.seed = seed;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] > 0.5) sample.indices.push_back(k);
  }
  return sample;
}

BatchSample bernoulli_round(std::span<const double> q, std::uint64_t seed) {
  check_inclusion_probs(q);
  Rng rng(seed);
  BatchSample sample;
  sample.seed = seed;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (rng.uniform01() < q[i]) sample.indices.push_back(i);
  }
  return sample;
}

}  // namespace rad
