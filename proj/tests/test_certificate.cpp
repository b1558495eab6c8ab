#include <doctest.h>

#include <cmath>
#include <numeric>

#include "core/certificate.hpp"
#include "core/oracle.hpp"
#include "core/rng.hpp"

using namespace rad;

TEST_CASE("certificate for the relative three-point instance") {
  const RobustInstance instance = RobustInstance::make(
      std::vector<double>{0.9, 0.6, 0.3}, LossModel::relative(0.5), 1.0);
  const SamplerSolution solution = solve_general(instance);
  const DualCertificate cert = build_certificate(instance, solution);

  CHECK(cert.mask_values[0] == doctest::Approx(0.515151515).epsilon(1e-8));
  CHECK(cert.mask_values[1] == doctest::Approx(0.606060606).epsilon(1e-8));
  CHECK(cert.mask_values[2] == doctest::Approx(0.878787878).epsilon(1e-8));
  const double mass =
      std::accumulate(cert.mask_values.begin(), cert.mask_values.end(), 0.0);
  CHECK(mass == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(cert.mass_residual <= 1e-12);
  CHECK(cert.upper_bound == doctest::Approx(0.2454545454).epsilon(1e-9));
  CHECK(cert.gap <= 1e-12);
}

TEST_CASE("zero budget yields the all-correct mask") {
  const RobustInstance instance = RobustInstance::make(
      std::vector<double>{0.9, 0.5, 0.2}, LossModel::zero(), 0.0);
  const SamplerSolution solution = solve_general(instance);
  const DualCertificate cert = build_certificate(instance, solution);
  for (double c : cert.mask_values) CHECK(c == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cert.mass_residual <= 1e-9);
  CHECK(cert.upper_bound == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("symmetric instance splits the mask evenly") {
  const RobustInstance instance =
      RobustInstance::make(std::vector<double>{1.0, 1.0}, LossModel::zero(), 1.0);
  const SamplerSolution solution = solve_general(instance);
  const DualCertificate cert = build_certificate(instance, solution);
  CHECK(cert.mask_values[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cert.mask_values[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cert.upper_bound == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("verify accepts solver output and rejects perturbations") {
  const RobustInstance instance = RobustInstance::make(
      std::vector<double>{0.9, 0.6, 0.3}, LossModel::relative(0.5), 1.0);
  SamplerSolution solution = solve_general(instance);
  CHECK(verify(instance, solution, 1e-9).is_optimal());

  // Shift probability between two support points: achieved value must drop.
  SamplerSolution perturbed = solution;
  perturbed.probs[0] += 0.01;
  perturbed.probs[2] -= 0.01;
  const Verdict verdict = verify(instance, perturbed, 1e-9);
  CHECK(verdict.kind == Verdict::Kind::suboptimal);
  CHECK(verdict.gap > 0.0);
  CHECK(game_value(instance, perturbed.probs) < solution.opt_value);

  // Breaking normalization must be flagged as infeasible.
  SamplerSolution broken = solution;
  broken.probs[0] += 0.2;
  const Verdict bad = verify(instance, broken, 1e-9);
  CHECK(bad.kind == Verdict::Kind::infeasible);
  CHECK(bad.reason.find("NotADistribution") != std::string::npos);
}

TEST_CASE("weak duality holds for arbitrary distributions") {
  Rng rng(601);
  for (int trial = 0; trial < 100; ++trial) {
    LossPolicy loss_policy;
    loss_policy.kind = trial % 2 == 0 ? LossPolicy::Kind::explicit_uniform
                                      : LossPolicy::Kind::relative;
    const RobustInstance instance =
        random_instance(derive_seed(602, trial), 2, 40, MPolicy{}, loss_policy);
    const SamplerSolution solution = solve_general(instance);
    const DualCertificate cert = build_certificate(instance, solution);

    // Random feasible p; its value never exceeds the certificate bound.
    const std::size_t n = instance.total_points();
    std::vector<double> p(n);
    double total = 0.0;
    for (double& x : p) {
      x = rng.uniform(0.0, 1.0);
      total += x;
    }
    for (double& x : p) x /= total;
    CHECK(game_value(instance, p) <= cert.upper_bound + 1e-10);
  }
}

TEST_CASE("strict duality gap for mass outside the support") {
  // Distinct gains, opt strictly above the next gain: any distribution with
  // mass beyond the support stays strictly below the bound.
  const RobustInstance instance = RobustInstance::make(
      std::vector<double>{0.9, 0.8, 0.1}, LossModel::zero(), 1.0);
  const SamplerSolution solution = solve_general(instance);
  REQUIRE(solution.k_star == 2);
  std::vector<double> sorted{0.9, 0.8, 0.1};
  REQUIRE(solution.opt_value > sorted[2]);

  const DualCertificate cert = build_certificate(instance, solution);
  const std::vector<double> outside{0.4, 0.3, 0.3};
  CHECK(game_value(instance, outside) < cert.upper_bound - 1e-6);
}

TEST_CASE("support coefficients of the mask equal the game value") {
  Rng rng(603);
  for (int trial = 0; trial < 50; ++trial) {
    LossPolicy loss_policy;
    loss_policy.kind = LossPolicy::Kind::explicit_uniform;
    const RobustInstance instance =
        random_instance(derive_seed(604, trial), 3, 60, MPolicy{}, loss_policy);
    const SamplerSolution solution = solve_general(instance);
    const DualCertificate cert = build_certificate(instance, solution);

    std::vector<double> gain_of(instance.total_points(), 0.0);
    for (std::size_t pos = 0; pos < instance.gains.values.size(); ++pos) {
      gain_of[instance.gains.original_index[pos]] = instance.gains.values[pos];
    }
    for (std::size_t r = 0; r < solution.k_star; ++r) {
      const std::size_t i = solution.sort_perm[r];
      const double g = gain_of[i];
      const double l = instance.loss_at(i, g);
      const double coefficient = cert.mask_values[i] * (g + l) - l;
      CHECK(coefficient ==
            doctest::Approx(solution.opt_value)
                .epsilon(1e-10 * std::max(1.0, std::fabs(solution.opt_value))));
    }
  }
}

TEST_CASE("certificate mass matches n - m for fractional budgets") {
  Rng rng(605);
  for (int trial = 0; trial < 60; ++trial) {
    LossPolicy loss_policy;
    loss_policy.kind = LossPolicy::Kind::relative;
    MPolicy m_policy;
    m_policy.integer = false;
    const RobustInstance instance =
        random_instance(derive_seed(606, trial), 2, 80, m_policy, loss_policy);
    const SamplerSolution solution = solve_general(instance);
    const DualCertificate cert = build_certificate(instance, solution);
    CHECK(cert.mass_residual <= 1e-9);
  }
}

TEST_CASE("abstain instances with small losses are reported, not certified") {
  // G_n < m with a near-zero loss on a low-gain point: the closed-form mask
  // clamps at zero, which verify reports as infeasible rather than optimal.
  const RobustInstance instance = RobustInstance::make(
      std::vector<double>{1.0, 0.5}, LossModel::explicit_values({19.0, 0.0}), 1.5);
  const SamplerSolution solution = solve_general(instance);
  CHECK(solution.should_abstain);
  const Verdict verdict = verify(instance, solution, 1e-9);
  CHECK_FALSE(verdict.is_optimal());
}
