#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "core/errors.hpp"

namespace rad {

// Estimate of the teacher's mislabel count over a pool, from a labeled
// validation sample, together with a Bernstein deviation bound on
// |m - m_hat| / pool_size.
struct MislabelEstimate {
  double m_hat = 0.0;
  std::size_t pool_size = 0;
  std::size_t validation_size = 0;
  double err_rate = 0.0;
  double delta = 0.0;
  double bound = 0.0;
};

// Two-sided Bernstein deviation bound for estimating a Bernoulli(p) mean from
// both a pool of the given size and a validation sample of size k:
//   log(4/d) (1/pool + 1/k) + sqrt(2 p (1-p) log(4/d)) (1/sqrt(pool) + 1/sqrt(k)).
// Conservative mode replaces p(1-p) by its maximum 1/4.
double bernstein_bound(double p, std::size_t pool_size, std::size_t validation_size,
                       double delta, bool conservative = false);

MislabelEstimate estimate_m(std::span<const int> predicted, std::span<const int> actual,
                            std::size_t pool_size, double delta = 0.05,
                            bool conservative = false);

// Shrinkage that keeps the plugged-in budget at or below the truth whenever
// m_hat is within the (1 +- eps) band: m_hat / (1 + eps).
double shrink_m(double m_hat, double epsilon);

// How competitive is the solution computed with a shrunk estimated budget,
// relative to the optimum under the true budget (zero-loss objective
// (k - m) / sum_{j<=k} 1/g_j; an optional relative weight w switches to the
// penalized budget (1+w) m).
struct ApproxMReport {
  double m_true = 0.0;
  double m_tilde = 0.0;
  double epsilon = 0.0;
  double alpha = 0.0;             // boundary gain of the true-budget support
  double beta = 0.0;              // alpha / (2 (2 - alpha))
  bool precondition_ok = false;   // epsilon < beta and m_hat within (1 +- eps) m
  double guaranteed_ratio = 1.0;  // 1 - 2 eps m / (2 eps m + 1 + eps)
  double realized_ratio = 1.0;
};

ApproxMReport competitiveness_report(std::span<const double> gains, double m_true,
                                     double m_hat, double epsilon,
                                     std::optional<double> relative_weight = {});

// Bootstrap budget spent on uniform queries before the solver takes over:
// max(100, ceil(0.1 b)), never more than b.
std::int64_t default_bootstrap_budget(std::int64_t b);

}  // namespace rad
