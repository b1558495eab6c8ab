#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "rad/rad.h"

TEST_CASE("C API solve, certificate, and verify round trip") {
  const std::vector<double> gains{0.9, 0.6, 0.3};

  rad_solution* solution = nullptr;
  REQUIRE(rad_solve_relative(gains.data(), gains.size(), 1.0, 0.5, &solution) == RAD_OK);
  CHECK(rad_solution_size(solution) == 3);
  CHECK(rad_solution_support_size(solution) == 3);
  CHECK(rad_solution_should_abstain(solution) == 0);
  CHECK(rad_solution_value(solution) == doctest::Approx(0.2454545454).epsilon(1e-9));

  std::vector<double> probs(3);
  REQUIRE(rad_solution_probs(solution, probs.data(), probs.size()) == RAD_OK);
  CHECK(probs[2] == doctest::Approx(0.54545454).epsilon(1e-7));

  std::vector<double> losses(3);
  for (std::size_t i = 0; i < 3; ++i) losses[i] = 0.5 * gains[i];

  double value = 0.0;
  REQUIRE(rad_game_value(gains.data(), 3, losses.data(), 1.0, probs.data(), &value) ==
          RAD_OK);
  CHECK(value == doctest::Approx(rad_solution_value(solution)).epsilon(1e-10));

  rad_certificate* cert = nullptr;
  REQUIRE(rad_build_certificate(gains.data(), 3, losses.data(), 1.0, solution, &cert) ==
          RAD_OK);
  CHECK(rad_certificate_gap(cert) <= 1e-10);
  CHECK(rad_certificate_mass_residual(cert) <= 1e-9);
  std::vector<double> mask(3);
  REQUIRE(rad_certificate_mask(cert, mask.data(), mask.size()) == RAD_OK);
  CHECK(mask[0] == doctest::Approx(0.515151).epsilon(1e-5));

  rad_verdict verdict;
  double gap = 0.0;
  char reason[256];
  REQUIRE(rad_verify(gains.data(), 3, losses.data(), 1.0, solution, 1e-9, &verdict,
                     &gap, reason, sizeof(reason)) == RAD_OK);
  CHECK(verdict == RAD_VERDICT_OPTIMAL);

  double best = 0.0;
  uint64_t evals = 0;
  REQUIRE(rad_grid_oracle(gains.data(), 3, losses.data(), 1.0, 0.02, &best, &evals) ==
          RAD_OK);
  CHECK(best <= rad_solution_value(solution) + 1e-10);
  CHECK(evals > 0);

  rad_certificate_free(cert);
  rad_solution_free(solution);
}

TEST_CASE("C API error reporting") {
  rad_solution* solution = nullptr;
  const std::vector<double> gains{0.5, 0.4};
  CHECK(rad_solve_relative(gains.data(), 2, 5.0, 0.5, &solution) ==
        RAD_ERR_INVALID_BUDGET);
  CHECK(std::strlen(rad_last_error()) > 0);
  CHECK(std::string(rad_status_name(RAD_ERR_INVALID_BUDGET)) == "InvalidBudget");
  CHECK(rad_solve_relative(gains.data(), 2, 0.5, 2.0, &solution) ==
        RAD_ERR_INVALID_WEIGHT);
  CHECK(rad_solve_general(nullptr, 0, nullptr, 0.0, &solution) ==
        RAD_ERR_EMPTY_INSTANCE);
}

TEST_CASE("C API batch planning and rounding") {
  const std::vector<double> probs{0.6, 0.3, 0.1};
  std::vector<double> q(3);
  double total = 0.0;
  REQUIRE(rad_plan_batch(probs.data(), 3, 2, RAD_PLAN_WATER_FILL, q.data(), &total) ==
          RAD_OK);
  CHECK(total == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(q[0] == doctest::Approx(1.0));

  std::vector<size_t> indices(3);
  size_t count = 0;
  REQUIRE(rad_dep_round(q.data(), 3, 42, indices.data(), indices.size(), &count) ==
          RAD_OK);
  CHECK(count == 2);

  int64_t safe = 0;
  REQUIRE(rad_max_safe_batch(probs.data(), 3, &safe) == RAD_OK);
  CHECK(safe == 1);

  REQUIRE(rad_bernoulli_round(q.data(), 3, 42, indices.data(), indices.size(),
                              &count) == RAD_OK);
  CHECK(count >= 1);
}

TEST_CASE("C API gains and estimation") {
  const std::vector<double> prediction{0.5, 0.3, 0.2};
  double out = 0.0;
  REQUIRE(rad_margin(prediction.data(), 3, &out) == RAD_OK);
  CHECK(out == doctest::Approx(0.2));
  REQUIRE(rad_margin_gain(prediction.data(), 3, &out) == RAD_OK);
  CHECK(out == doctest::Approx(0.8));
  REQUIRE(rad_entropy_gain(prediction.data(), 3, &out) == RAD_OK);
  CHECK(out > 0.0);

  const std::vector<int> pred{0, 1, 1, 0};
  const std::vector<int> truth{0, 1, 0, 0};
  char* json = nullptr;
  REQUIRE(rad_estimate_m(pred.data(), truth.data(), 4, 100, 0.05, 0, &json) == RAD_OK);
  const std::string text(json);
  rad_string_free(json);
  CHECK(text.find("\"m_hat\":25") != std::string::npos);

  REQUIRE(rad_shrink_m(110.0, 0.1, &out) == RAD_OK);
  CHECK(out == doctest::Approx(100.0));

  double w = 0.0;
  REQUIRE(rad_default_w(5.0, 10, &w) == RAD_OK);
  CHECK(w == doctest::Approx(0.5));
}

TEST_CASE("C API simulators and canonical JSON") {
  const char* game_config = R"({
    "schema_version": 1, "n": 40, "m": 8, "b": 4, "rounds": 2,
    "loss": {"kind": "relative"},
    "world": {"kind": "adversarial_top_gain"},
    "strategies": ["uniform", "rad"],
    "seeds": [1, 2]
  })";
  char* trace = nullptr;
  char* csv = nullptr;
  REQUIRE(rad_simulate_game(game_config, &trace, &csv) == RAD_OK);
  CHECK(std::string(trace).find("\"kind\":\"game_trace\"") != std::string::npos);
  CHECK(std::string(csv).find("strategy,seed,round") != std::string::npos);
  rad_string_free(trace);
  rad_string_free(csv);

  char* canon = nullptr;
  REQUIRE(rad_json_canonicalize("{\"b\": 2.5, \"a\": [1, 2]}", &canon) == RAD_OK);
  CHECK(std::string(canon) == "{\"a\":[1,2],\"b\":2.5}");
  rad_string_free(canon);

  CHECK(rad_json_canonicalize("{nope", &canon) == RAD_ERR_IO);
}

TEST_CASE("C API bench emits a CSV with one row per size") {
  const std::vector<uint64_t> sizes{64, 128};
  char* csv = nullptr;
  REQUIRE(rad_bench_solve(sizes.data(), sizes.size(), 3, 7, &csv) == RAD_OK);
  const std::string text(csv);
  rad_string_free(csv);
  CHECK(text.find("n,median_seconds,repeats") != std::string::npos);
  CHECK(text.find("\n64,") != std::string::npos);
  CHECK(text.find("\n128,") != std::string::npos);
}
