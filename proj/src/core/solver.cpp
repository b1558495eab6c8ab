#include "core/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rad {
namespace {

// Relative slack used to detect ties in the prefix-ratio argmax. Prefix sums
// accumulate rounding of order n*eps, so exactly-flat instances (equal gains)
// show up as near-ties; the band is still two orders below every tolerance
// asserted on solutions.
constexpr double kTieBand = 1e-12;

bool all_finite(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(),
                     [](double x) { return std::isfinite(x); });
}

double kahan_sum(std::span<const double> xs) {
  double sum = 0.0, carry = 0.0;
  for (double x : xs) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

void check_distribution(std::span<const double> probs) {
  require(all_finite(probs), Errc::non_finite_input, "probabilities must be finite");
  for (double p : probs) {
    require(p >= -1e-12, Errc::not_a_distribution, "negative probability");
  }
  const double total = kahan_sum(probs);
  require(std::fabs(total - 1.0) <= 1e-9, Errc::not_a_distribution,
          "probabilities must sum to 1");
}

// Internal descending-gain order over eligible points; ties resolved by
// lower caller index (stable).
std::vector<std::size_t> descending_order(const GainVector& gains) {
  std::vector<std::size_t> order(gains.eligible_count());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return gains.values[a] > gains.values[b];
  });
  return order;
}

// Largest k whose prefix ratio lies within the tie band of the maximum.
std::size_t argmax_prefix_ratio(std::span<const double> ratio) {
  double best = -std::numeric_limits<double>::infinity();
  for (double r : ratio) best = std::max(best, r);
  const double band = kTieBand * std::max(1.0, std::fabs(best));
  std::size_t k_star = 0;
  for (std::size_t k = 0; k < ratio.size(); ++k) {
    if (ratio[k] >= best - band) k_star = k;
  }
  return k_star + 1;  // prefix length
}

}  // namespace

LossModel LossModel::relative(double w) {
  require(std::isfinite(w), Errc::non_finite_input, "relative weight must be finite");
  require(w >= 0.0 && w <= 1.0, Errc::invalid_weight, "relative weight must lie in [0,1]");
  LossModel model;
  model.kind = Kind::relative;
  model.weight = w;
  return model;
}

LossModel LossModel::explicit_values(std::vector<double> v) {
  require(all_finite(v), Errc::non_finite_input, "losses must be finite");
  for (double x : v) {
    require(x >= 0.0, Errc::invalid_loss, "losses must be non-negative");
  }
  LossModel model;
  model.kind = Kind::explicit_values;
  model.values = std::move(v);
  return model;
}

GainVector GainVector::from_raw(std::span<const double> raw, double eligibility_eps) {
  require(all_finite(raw), Errc::non_finite_input, "gains must be finite");
  GainVector out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] > eligibility_eps) {
      out.values.push_back(raw[i]);
      out.original_index.push_back(i);
    } else {
      require(raw[i] >= 0.0, Errc::non_finite_input, "gains must be non-negative");
      out.excluded_values.push_back(raw[i]);
      out.excluded_index.push_back(i);
    }
  }
  return out;
}

double RobustInstance::loss_at(std::size_t caller_index, double gain) const {
  switch (losses.kind) {
    case LossModel::Kind::zero:
      return 0.0;
    case LossModel::Kind::relative:
      return losses.weight * gain;
    case LossModel::Kind::explicit_values:
      return losses.values[caller_index];
  }
  return 0.0;
}

void RobustInstance::validate() const {
  require(eligible_count() >= 1, Errc::empty_instance, "no eligible gains");
  require(std::isfinite(adversary_budget), Errc::non_finite_input,
          "adversary budget must be finite");
  require(adversary_budget >= 0.0 &&
              adversary_budget < static_cast<double>(eligible_count()),
          Errc::invalid_budget, "adversary budget must lie in [0, n)");
  if (losses.kind == LossModel::Kind::explicit_values) {
    require(losses.values.size() == total_points(), Errc::dimension_mismatch,
            "explicit losses must align with gains");
  }
  if (losses.kind == LossModel::Kind::relative) {
    require(losses.weight >= 0.0 && losses.weight <= 1.0, Errc::invalid_weight,
            "relative weight must lie in [0,1]");
  }
}

RobustInstance RobustInstance::make(std::span<const double> raw_gains, LossModel losses,
                                    double m, double eligibility_eps) {
  RobustInstance instance;
  instance.gains = GainVector::from_raw(raw_gains, eligibility_eps);
  instance.losses = std::move(losses);
  instance.adversary_budget = m;
  instance.validate();
  return instance;
}

SamplerSolution solve_general(const RobustInstance& instance) {
  instance.validate();
  const GainVector& gains = instance.gains;
  const std::size_t n = gains.eligible_count();
  const double m = instance.adversary_budget;

  const std::vector<std::size_t> order = descending_order(gains);

  // Prefix ratios N(k) = (G_k - m) / H_k in descending-gain order.
  std::vector<double> denom(n);  // g_i + l_i per sorted position
  std::vector<double> ratio(n);
  double prefix_g = 0.0, prefix_h = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t pos = order[r];
    const double g = gains.values[pos];
    const double l = instance.loss_at(gains.original_index[pos], g);
    require(l >= 0.0, Errc::invalid_loss, "losses must be non-negative");
    denom[r] = g + l;
    prefix_g += g / denom[r];
    prefix_h += 1.0 / denom[r];
    ratio[r] = (prefix_g - m) / prefix_h;
  }

  const std::size_t k_star = argmax_prefix_ratio(ratio);

  SamplerSolution solution;
  solution.k_star = k_star;
  solution.opt_value = ratio[k_star - 1];
  solution.should_abstain = solution.opt_value < 0.0;
  solution.probs.assign(gains.total_points(), 0.0);
  solution.sort_perm.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    solution.sort_perm[r] = gains.original_index[order[r]];
  }

  double support_h = 0.0;
  for (std::size_t r = 0; r < k_star; ++r) support_h += 1.0 / denom[r];
  for (std::size_t r = 0; r < k_star; ++r) {
    solution.probs[solution.sort_perm[r]] = (1.0 / denom[r]) / support_h;
  }
  return solution;
}

SamplerSolution solve_relative(std::span<const double> raw_gains, double m, double w,
                               double eligibility_eps) {
  require(std::isfinite(w), Errc::non_finite_input, "relative weight must be finite");
  require(w >= 0.0 && w <= 1.0, Errc::invalid_weight, "relative weight must lie in [0,1]");
  require(std::isfinite(m), Errc::non_finite_input, "adversary budget must be finite");

  GainVector gains = GainVector::from_raw(raw_gains, eligibility_eps);
  const std::size_t n = gains.eligible_count();
  require(n >= 1, Errc::empty_instance, "no eligible gains");
  require(m >= 0.0 && m < static_cast<double>(n), Errc::invalid_budget,
          "adversary budget must lie in [0, n)");

  const std::vector<std::size_t> order = descending_order(gains);

  // N(k) = (k - (1+w) m) / sum_{j<=k} 1/g_j.
  std::vector<double> inv_gain(n);
  std::vector<double> ratio(n);
  const double penalized_m = (1.0 + w) * m;
  double prefix_inv = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    inv_gain[r] = 1.0 / gains.values[order[r]];
    prefix_inv += inv_gain[r];
    ratio[r] = (static_cast<double>(r + 1) - penalized_m) / prefix_inv;
  }

  const std::size_t k_star = argmax_prefix_ratio(ratio);

  SamplerSolution solution;
  solution.k_star = k_star;
  solution.opt_value = ratio[k_star - 1];
  solution.should_abstain = solution.opt_value < 0.0;
  solution.probs.assign(gains.total_points(), 0.0);
  solution.sort_perm.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    solution.sort_perm[r] = gains.original_index[order[r]];
  }

  double support_inv = 0.0;
  for (std::size_t r = 0; r < k_star; ++r) support_inv += inv_gain[r];
  for (std::size_t r = 0; r < k_star; ++r) {
    solution.probs[solution.sort_perm[r]] = inv_gain[r] / support_inv;
  }
  return solution;
}

double default_w(double m, std::size_t n) {
  require(std::isfinite(m), Errc::non_finite_input, "adversary budget must be finite");
  require(n >= 1 && m >= 0.0 && m < static_cast<double>(n), Errc::invalid_budget,
          "adversary budget must lie in [0, n)");
  return 1.0 - m / static_cast<double>(n);
}

namespace {

struct FullGainLoss {
  std::vector<double> gain;
  std::vector<double> loss;
};

FullGainLoss expand_to_caller_order(const RobustInstance& instance) {
  FullGainLoss full;
  const std::size_t n = instance.total_points();
  full.gain.assign(n, 0.0);
  full.loss.assign(n, 0.0);
  const GainVector& gains = instance.gains;
  for (std::size_t pos = 0; pos < gains.values.size(); ++pos) {
    const std::size_t i = gains.original_index[pos];
    full.gain[i] = gains.values[pos];
    full.loss[i] = instance.loss_at(i, gains.values[pos]);
  }
  for (std::size_t pos = 0; pos < gains.excluded_index.size(); ++pos) {
    const std::size_t i = gains.excluded_index[pos];
    full.gain[i] = gains.excluded_values[pos];
    full.loss[i] = instance.loss_at(i, gains.excluded_values[pos]);
  }
  return full;
}

}  // namespace

double game_value(const RobustInstance& instance, std::span<const double> probs) {
  instance.validate();
  require(probs.size() == instance.total_points(), Errc::dimension_mismatch,
          "probability vector length mismatch");
  check_distribution(probs);

  const FullGainLoss full = expand_to_caller_order(instance);
  const std::size_t n = probs.size();
  const double m = instance.adversary_budget;
  const auto whole = static_cast<std::size_t>(std::floor(m));
  const double frac = m - static_cast<double>(whole);

  std::vector<double> weighted(n);
  double total = 0.0, loss_term = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    weighted[i] = probs[i] * (full.gain[i] + full.loss[i]);
    total += weighted[i];
    loss_term += probs[i] * full.loss[i];
  }

  // Adversary removes the floor(m) largest weighted masses in full, plus a
  // frac(m) share of the next largest.
  double removed = 0.0;
  if (whole > 0 || frac > 0.0) {
    std::vector<double> sorted = weighted;
    const std::size_t take = std::min(whole, n);
    std::partial_sort(sorted.begin(), sorted.begin() + std::min(take + 1, n),
                      sorted.end(), std::greater<double>());
    for (std::size_t i = 0; i < take; ++i) removed += sorted[i];
    if (frac > 0.0 && take < n) removed += frac * sorted[take];
  }
  return total - removed - loss_term;
}

std::vector<double> worst_case_mask(const RobustInstance& instance,
                                    std::span<const double> probs) {
  instance.validate();
  require(probs.size() == instance.total_points(), Errc::dimension_mismatch,
          "probability vector length mismatch");
  check_distribution(probs);

  const FullGainLoss full = expand_to_caller_order(instance);
  const std::size_t n = probs.size();
  const double m = instance.adversary_budget;
  const auto whole = static_cast<std::size_t>(std::floor(m));
  const double frac = m - static_cast<double>(whole);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return probs[a] * (full.gain[a] + full.loss[a]) >
           probs[b] * (full.gain[b] + full.loss[b]);
  });

  std::vector<double> mask(n, 1.0);
  for (std::size_t r = 0; r < std::min(whole, n); ++r) mask[order[r]] = 0.0;
  if (frac > 0.0 && whole < n) mask[order[whole]] = 1.0 - frac;
  return mask;
}

double expected_payoff(const RobustInstance& instance, std::span<const double> probs,
                       std::span<const double> mask) {
  require(probs.size() == instance.total_points() && mask.size() == probs.size(),
          Errc::dimension_mismatch, "mask/probability length mismatch");
  const FullGainLoss full = expand_to_caller_order(instance);
  double value = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    value += probs[i] * (mask[i] * (full.gain[i] + full.loss[i]) - full.loss[i]);
  }
  return value;
}

}  // namespace rad
