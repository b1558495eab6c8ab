#include "core/estimation.hpp"

#include <algorithm>
#include <cmath>

#include "core/solver.hpp"

namespace rad {

double bernstein_bound(double p, std::size_t pool_size, std::size_t validation_size,
                       double delta, bool conservative) {
  require(pool_size >= 1 && validation_size >= 1, Errc::out_of_range,
          "pool and validation sizes must be positive");
  require(delta > 0.0 && delta < 1.0, Errc::out_of_range, "delta must lie in (0,1)");
  require(p >= 0.0 && p <= 1.0, Errc::out_of_range, "rate must lie in [0,1]");
  const double log_term = std::log(4.0 / delta);
  const double variance = conservative ? 0.25 : p * (1.0 - p);
  const double pool = static_cast<double>(pool_size);
  const double k = static_cast<double>(validation_size);
  return log_term * (1.0 / pool + 1.0 / k) +
         std::sqrt(2.0 * variance * log_term) *
             (1.0 / std::sqrt(pool) + 1.0 / std::sqrt(k));
}

MislabelEstimate estimate_m(std::span<const int> predicted, std::span<const int> actual,
                            std::size_t pool_size, double delta, bool conservative) {
  require(!predicted.empty(), Errc::empty_validation, "validation sample is empty");
  require(predicted.size() == actual.size(), Errc::dimension_mismatch,
          "predicted/actual label lengths differ");
  require(pool_size >= 1, Errc::out_of_range, "pool size must be positive");

  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] != actual[i]) ++mismatches;
  }

  MislabelEstimate estimate;
  estimate.pool_size = pool_size;
  estimate.validation_size = predicted.size();
  estimate.err_rate =
      static_cast<double>(mismatches) / static_cast<double>(predicted.size());
  estimate.m_hat = estimate.err_rate * static_cast<double>(pool_size);
  estimate.delta = delta;
  estimate.bound =
      bernstein_bound(estimate.err_rate, pool_size, predicted.size(), delta, conservative);
  return estimate;
}

double shrink_m(double m_hat, double epsilon) {
  require(std::isfinite(m_hat) && m_hat >= 0.0, Errc::out_of_range,
          "estimate must be non-negative");
  require(std::isfinite(epsilon) && epsilon >= 0.0, Errc::out_of_range,
          "epsilon must be non-negative");
  return m_hat / (1.0 + epsilon);
}

namespace {

// Zero-loss prefix objective (k - m) / sum_{j<=k} 1/g_j evaluated at the
// support size chosen by the solver for budget m_solve, scored under m_score.
double prefix_objective(std::span<const double> gains_desc, std::size_t k,
                        double m_score) {
  double inv = 0.0;
  for (std::size_t r = 0; r < k; ++r) inv += 1.0 / gains_desc[r];
  return (static_cast<double>(k) - m_score) / inv;
}

}  // namespace

ApproxMReport competitiveness_report(std::span<const double> gains, double m_true,
                                     double m_hat, double epsilon,
                                     std::optional<double> relative_weight) {
  require(std::isfinite(m_true) && m_true >= 0.0, Errc::out_of_range,
          "true budget must be non-negative");
  require(std::isfinite(m_hat) && m_hat >= 0.0, Errc::out_of_range,
          "estimate must be non-negative");
  require(std::isfinite(epsilon) && epsilon >= 0.0, Errc::out_of_range,
          "epsilon must be non-negative");

  // The relative-loss generalization plugs the penalized budget (1+w) m into
  // the zero-loss analysis.
  const double scale = relative_weight ? 1.0 + *relative_weight : 1.0;
  const double m = scale * m_true;
  const double m_hat_scaled = scale * m_hat;

  ApproxMReport report;
  report.m_true = m_true;
  report.epsilon = epsilon;
  report.m_tilde = shrink_m(m_hat_scaled, epsilon) / scale;

  GainVector eligible = GainVector::from_raw(gains);
  const std::size_t n = eligible.eligible_count();
  require(n >= 1, Errc::empty_instance, "no eligible gains");
  require(m < static_cast<double>(n), Errc::invalid_budget,
          "penalized budget must stay below n");

  std::vector<double> sorted(eligible.values);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());

  const RobustInstance true_instance =
      RobustInstance::make(gains, LossModel::zero(), m);
  const SamplerSolution true_solution = solve_general(true_instance);
  report.alpha = sorted[true_solution.k_star - 1];
  report.beta = report.alpha / (2.0 * (2.0 - report.alpha));

  const double m_tilde_scaled = shrink_m(m_hat_scaled, epsilon);
  const RobustInstance shrunk_instance =
      RobustInstance::make(gains, LossModel::zero(), std::min(m_tilde_scaled, m));
  const SamplerSolution shrunk_solution = solve_general(shrunk_instance);

  const double opt = prefix_objective(sorted, true_solution.k_star, m);
  const double achieved = prefix_objective(sorted, shrunk_solution.k_star, m);
  report.realized_ratio = opt != 0.0 ? achieved / opt : 1.0;

  const bool band_ok = m_hat_scaled >= (1.0 - epsilon) * m - 1e-12 &&
                       m_hat_scaled <= (1.0 + epsilon) * m + 1e-12;
  report.precondition_ok = band_ok && epsilon < report.beta;
  report.guaranteed_ratio =
      1.0 - 2.0 * epsilon * m / (2.0 * epsilon * m + 1.0 + epsilon);
  return report;
}

std::int64_t default_bootstrap_budget(std::int64_t b) {
  require(b >= 1, Errc::invalid_batch, "batch size must be at least 1");
  const auto tenth = static_cast<std::int64_t>(
      std::ceil(0.1 * static_cast<double>(b)));
  return std::min<std::int64_t>(b, std::max<std::int64_t>(100, tenth));
}

}  // namespace rad
