#pragma once

#include <cstdint>

#include "core/solver.hpp"

namespace rad {

// Exhaustive simplex-grid maximization of the game objective for tiny n.
// The duality certificate is the primary verifier; this is an independent
// cross-check that touches none of the closed-form code paths.
struct OracleResult {
  double best_value = 0.0;
  std::vector<double> best_p;
  double grid_step = 0.0;
  std::uint64_t evaluations = 0;
};

OracleResult grid_oracle(const RobustInstance& instance, double step);

// Number of grid points the oracle visits: C(ticks + n - 1, n - 1).
std::uint64_t simplex_grid_size(std::uint64_t ticks, std::size_t n);

// Random instances shared by the property and acceptance suites.
struct MPolicy {
  bool integer = false;       // floor the drawn budget
  double fraction_lo = 0.0;   // budget drawn as fraction * G_n, G_n = sum g/(g+l)
  double fraction_hi = 0.3;   // (keeps every instance inside the G_n >= m regime)
};

struct LossPolicy {
  enum class Kind { zero, relative, explicit_uniform };
  Kind kind = Kind::zero;
  double w_lo = 0.0, w_hi = 1.0;          // relative: weight drawn uniformly
  double loss_lo = 0.0, loss_hi = 1.0;    // explicit: per-point uniform draws
};

RobustInstance random_instance(std::uint64_t seed, std::size_t n_lo, std::size_t n_hi,
                               const MPolicy& m_policy, const LossPolicy& loss_policy,
                               double gain_lo = 0.01, double gain_hi = 1.0);

}  // namespace rad
