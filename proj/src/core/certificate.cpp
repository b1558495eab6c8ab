#include "core/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace rad {
namespace {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

}  // namespace

DualCertificate build_certificate(const RobustInstance& instance,
                                  const SamplerSolution& solution) {
  instance.validate();
  const GainVector& gains = instance.gains;
  const std::size_t n_total = instance.total_points();
  const std::size_t n_eligible = instance.eligible_count();
  require(solution.probs.size() == n_total &&
              solution.sort_perm.size() == n_eligible &&
              solution.k_star >= 1 && solution.k_star <= n_eligible,
          Errc::dimension_mismatch, "solution does not match instance");

  const double opt = solution.opt_value;

  DualCertificate cert;
  cert.mask_values.assign(n_total, 1.0);

  // Gains by caller index for the eligible set.
  std::vector<double> gain_of(n_total, 0.0);
  for (std::size_t pos = 0; pos < n_eligible; ++pos) {
    gain_of[gains.original_index[pos]] = gains.values[pos];
  }

  double mass = 0.0;
  double best_response = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < n_eligible; ++r) {
    const std::size_t i = solution.sort_perm[r];
    const double g = gain_of[i];
    const double l = instance.loss_at(i, g);
    double c;
    if (r < solution.k_star) {
      const double raw = (opt + l) / (g + l);
      c = std::clamp(raw, 0.0, 1.0);
      cert.support_clamp_residual =
          std::max(cert.support_clamp_residual, std::fabs(raw - c));
    } else {
      c = 1.0;
    }
    cert.mask_values[i] = c;
    best_response = std::max(best_response, c * (g + l) - l);
    mass += c;
  }
  // Ineligible points carry c = 1; their best-response coefficient is their
  // (near-zero) gain.
  for (double g : gains.excluded_values) {
    best_response = std::max(best_response, g);
    mass += 1.0;
  }

  cert.upper_bound = best_response;
  cert.mass_residual = std::fabs(
      mass - (static_cast<double>(n_total) - instance.adversary_budget));
  cert.gap = std::fabs(cert.upper_bound - opt);
  return cert;
}

Verdict verify(const RobustInstance& instance, const SamplerSolution& solution,
               double tol) {
  require(tol > 0.0, Errc::out_of_range, "tolerance must be positive");

  Verdict verdict;
  const double scale = std::max(1.0, std::fabs(solution.opt_value));

  // Feasibility of the claimed distribution.
  double achieved;
  try {
    achieved = game_value(instance, solution.probs);
  } catch (const Error& e) {
    if (e.code() != Errc::not_a_distribution) throw;
    verdict.kind = Verdict::Kind::infeasible;
    verdict.reason = std::string(errc_name(e.code())) + ": " + e.what();
    verdict.gap = std::numeric_limits<double>::infinity();
    return verdict;
  }

  DualCertificate cert = build_certificate(instance, solution);

  // A clamped support entry means the closed-form adversary response is not
  // feasible for this instance/solution pair; the certificate proves nothing.
  if (cert.support_clamp_residual > 1e-9 || cert.mass_residual > 1e-9) {
    verdict.kind = Verdict::Kind::infeasible;
    verdict.reason = "certificate infeasible: mass_residual=" +
                     format_double(cert.mass_residual) + " support_clamp=" +
                     format_double(cert.support_clamp_residual);
    verdict.gap = std::max(cert.mass_residual, cert.support_clamp_residual);
    return verdict;
  }

  const double primal_dev = std::fabs(achieved - solution.opt_value) / scale;
  const double dual_dev = std::fabs(cert.upper_bound - solution.opt_value) / scale;
  if (primal_dev <= tol && dual_dev <= tol) {
    verdict.kind = Verdict::Kind::optimal;
    verdict.gap = std::max(primal_dev, dual_dev);
    return verdict;
  }

  verdict.kind = Verdict::Kind::suboptimal;
  verdict.gap = std::max(primal_dev, dual_dev);
  verdict.reason.clear();
  if (primal_dev > tol) {
    verdict.reason += "achieved value off by " + format_double(primal_dev) + " (rel)";
  }
  if (dual_dev > tol) {
    if (!verdict.reason.empty()) verdict.reason += "; ";
    verdict.reason += "upper bound off by " + format_double(dual_dev) + " (rel)";
  }
  return verdict;
}

}  // namespace rad
