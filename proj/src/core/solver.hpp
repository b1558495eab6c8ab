#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "core/errors.hpp"

namespace rad {

// Points with a gain at or below this threshold are excluded from the solve
// and carry probability zero in every returned distribution.
inline constexpr double kGainEligibilityEps = 1e-12;

// Per-point penalty charged when a selected point turns out to be mislabeled.
struct LossModel {
  enum class Kind { zero, relative, explicit_values };

  Kind kind = Kind::zero;
  double weight = 0.0;          // relative: loss_i = weight * gain_i
  std::vector<double> values;   // explicit: caller index order

  static LossModel zero() { return LossModel{}; }
  static LossModel relative(double w);
  static LossModel explicit_values(std::vector<double> v);
};

// Eligible gains plus the mapping back to the caller's index space.
// Ineligible points (gain <= threshold) are kept aside so that evaluation
// over the full point set remains possible; they can never enter a support.
struct GainVector {
  std::vector<double> values;                 // eligible gains, caller order
  std::vector<std::size_t> original_index;    // eligible -> caller index
  std::vector<std::size_t> excluded_index;    // ineligible caller indices
  std::vector<double> excluded_values;        // their raw gains

  std::size_t eligible_count() const { return values.size(); }
  std::size_t total_points() const { return values.size() + excluded_index.size(); }

  static GainVector from_raw(std::span<const double> raw,
                             double eligibility_eps = kGainEligibilityEps);
};

// One robust-sampling game: gains, a loss model, and the adversary budget m
// (the number of points, possibly fractional, the teacher may mislabel).
struct RobustInstance {
  GainVector gains;
  LossModel losses;
  double adversary_budget = 0.0;  // m, in [0, eligible_count)

  std::size_t eligible_count() const { return gains.eligible_count(); }
  std::size_t total_points() const { return gains.total_points(); }

  // Loss of a point addressed by caller index.
  double loss_at(std::size_t caller_index, double gain) const;

  void validate() const;

  static RobustInstance make(std::span<const double> raw_gains, LossModel losses,
                             double m, double eligibility_eps = kGainEligibilityEps);
};

struct SamplerSolution {
  std::vector<double> probs;      // caller index order; ineligible points carry 0
  std::size_t k_star = 0;         // support size
  double opt_value = 0.0;         // game value achieved by probs
  bool should_abstain = false;    // opt_value < 0: not sampling dominates
  // sort_perm[r] = caller index of the r-th point in internal order
  // (descending gain, ties by lower caller index). Support = first k_star.
  std::vector<std::size_t> sort_perm;
};

// Closed-form optimum for arbitrary non-negative losses.
// k* maximizes (G_k - m) / H_k over prefixes of the descending-gain order,
// with G_k = sum g_i/(g_i+l_i) and H_k = sum 1/(g_i+l_i); on the support
// p_i = 1 / (H_{k*} (g_i + l_i)).
SamplerSolution solve_general(const RobustInstance& instance);

// Specialization for losses relative to the gain (l_i = w g_i): k* maximizes
// (k - (1+w) m) / sum_{j<=k} 1/g_j and p_i = 1 / (g_i sum_{j in support} 1/g_j).
SamplerSolution solve_relative(std::span<const double> raw_gains, double m, double w,
                               double eligibility_eps = kGainEligibilityEps);

// Penalization weight that guarantees a non-negative game value: 1 - m/n.
double default_w(double m, std::size_t n);

// Exact value of the inner minimization for an arbitrary distribution p over
// the instance's points (caller order): the adversary removes the floor(m)
// largest values of s_i = p_i (g_i + l_i) plus a frac(m) share of the next
// largest, and every selected-but-mislabeled point costs its loss.
double game_value(const RobustInstance& instance, std::span<const double> probs);

// The minimizing correctness mask behind game_value: zero on the floor(m)
// largest s_i, 1 - frac(m) on the next largest, one elsewhere. Caller order.
std::vector<double> worst_case_mask(const RobustInstance& instance,
                                    std::span<const double> probs);

// Expected payoff of distribution p against a fixed fractional mask c.
double expected_payoff(const RobustInstance& instance, std::span<const double> probs,
                       std::span<const double> mask);

}  // namespace rad
