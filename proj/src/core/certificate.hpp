#pragma once

#include <string>
#include <vector>

#include "core/solver.hpp"

namespace rad {

// Adversary best response proving optimality of a claimed solution. On the
// support c*_i = (opt + l_i) / (g_i + l_i); beyond it c*_i = 1. A correct
// solution makes the mask feasible (entries in [0,1], mass n - m) and its
// best-response value equal to the achieved game value, closing the minimax
// sandwich without any search.
struct DualCertificate {
  std::vector<double> mask_values;    // c*, caller index order
  double upper_bound = 0.0;           // max_i (c*_i (g_i + l_i) - l_i)
  double mass_residual = 0.0;         // |sum c* - (n - m)|
  double gap = 0.0;                   // |upper_bound - claimed opt_value|
  double support_clamp_residual = 0;  // clamping applied on support entries
};

DualCertificate build_certificate(const RobustInstance& instance,
                                  const SamplerSolution& solution);

struct Verdict {
  enum class Kind { optimal, suboptimal, infeasible };
  Kind kind = Kind::optimal;
  double gap = 0.0;      // worst relative deviation among failed checks
  std::string reason;    // which side failed and by how much

  bool is_optimal() const { return kind == Kind::optimal; }
};

// Optimal iff game_value(probs) and the certificate's upper bound both match
// opt_value within tol (relative to max(1, |opt_value|)) and all feasibility
// residuals pass.
Verdict verify(const RobustInstance& instance, const SamplerSolution& solution,
               double tol);

}  // namespace rad
