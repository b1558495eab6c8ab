#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/errors.hpp"

namespace rad {

enum class PlanMode {
  // Literal capped probabilities q_i = min(b p_i, 1); the total may fall
  // short of b. Feeds independent (Bernoulli) rounding.
  paper_cap,
  // Caps at 1 and rescales the uncapped remainder until the total equals
  // min(b, support size); feeds exact-size dependent rounding.
  water_fill,
};

struct BatchPlan {
  std::vector<double> q;        // per-point inclusion probabilities, caller order
  std::int64_t target = 0;      // requested batch size b
  PlanMode mode = PlanMode::paper_cap;
  double effective_total = 0;   // sum of q
};

BatchPlan plan_batch(std::span<const double> probs, std::int64_t b, PlanMode mode);

// Largest batch size for which the cap stays inactive: floor(1 / max_i p_i).
std::int64_t max_safe_batch(std::span<const double> probs);

struct BatchSample {
  std::vector<std::size_t> indices;  // ascending
  std::uint64_t seed = 0;
};

// Dependent rounding of inclusion probabilities with integral total b into an
// exact-size-b index set whose marginals match q. Linear time: a left-to-right
// scan pairs the two leftmost fractional entries and resolves one per step.
BatchSample dep_round(std::span<const double> q, std::uint64_t seed);

// Independent per-point inclusion; |indices| = sum q in expectation.
BatchSample bernoulli_round(std::span<const double> q, std::uint64_t seed);

namespace detail {

struct PairStep {
  double first;
  double second;
};

// One pairwise update of dependent rounding, branch chosen by u in [0,1).
// Preserves first + second and leaves each coordinate's expectation unchanged;
// exactly one output lands on 0 or 1.
PairStep dep_round_step(double pi, double pj, double u);

}  // namespace detail

}  // namespace rad
