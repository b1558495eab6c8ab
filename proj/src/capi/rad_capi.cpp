#include "rad/rad.h"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/certificate.hpp"
#include "core/distill_sim.hpp"
#include "core/estimation.hpp"
#include "core/gains.hpp"
#include "core/game_sim.hpp"
#include "core/json_canon.hpp"
#include "core/oracle.hpp"
#include "core/rng.hpp"
#include "core/sampling.hpp"
#include "core/solver.hpp"

namespace {

thread_local std::string g_last_error;

rad_status to_status(rad::Errc code) { return static_cast<rad_status>(code); }

template <typename Fn>
rad_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return RAD_OK;
  } catch (const rad::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RAD_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return RAD_ERR_INTERNAL;
  }
}

rad::RobustInstance make_instance(const double* gains, size_t n, const double* losses,
                                  double m) {
  rad::require(gains != nullptr && n > 0, rad::Errc::empty_instance, "no gains given");
  rad::LossModel model = losses == nullptr
                             ? rad::LossModel::zero()
                             : rad::LossModel::explicit_values(
                                   std::vector<double>(losses, losses + n));
  return rad::RobustInstance::make({gains, n}, std::move(model), m);
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

rad_status copy_indices(const std::vector<std::size_t>& indices, size_t* idx_out,
                        size_t idx_cap, size_t* out_count) {
  rad::require(out_count != nullptr, rad::Errc::out_of_range, "out_count is null");
  rad::require(idx_out != nullptr || indices.empty(), rad::Errc::out_of_range,
               "index buffer is null");
  rad::require(idx_cap >= indices.size(), rad::Errc::out_of_range,
               "index buffer too small");
  for (std::size_t i = 0; i < indices.size(); ++i) idx_out[i] = indices[i];
  *out_count = indices.size();
  return RAD_OK;
}

}  // namespace

struct rad_solution {
  rad::SamplerSolution value;
};

struct rad_certificate {
  rad::DualCertificate value;
};

extern "C" {

const char* rad_version(void) { return "rad 1.0.0"; }

const char* rad_status_name(rad_status status) {
  return rad::errc_name(static_cast<rad::Errc>(status));
}

const char* rad_last_error(void) { return g_last_error.c_str(); }

void rad_string_free(char* s) { delete[] s; }

rad_status rad_solve_general(const double* gains, size_t n, const double* losses,
                             double m, rad_solution** out) {
  return guarded([&] {
    rad::require(out != nullptr, rad::Errc::out_of_range, "out is null");
    auto instance = make_instance(gains, n, losses, m);
    *out = new rad_solution{rad::solve_general(instance)};
  });
}

rad_status rad_solve_relative(const double* gains, size_t n, double m, double w,
                              rad_solution** out) {
  return guarded([&] {
    rad::require(out != nullptr, rad::Errc::out_of_range, "out is null");
    rad::require(gains != nullptr && n > 0, rad::Errc::empty_instance, "no gains given");
    *out = new rad_solution{rad::solve_relative({gains, n}, m, w)};
  });
}

size_t rad_solution_size(const rad_solution* s) { return s->value.probs.size(); }

int64_t rad_solution_support_size(const rad_solution* s) {
  return static_cast<int64_t>(s->value.k_star);
}

double rad_solution_value(const rad_solution* s) { return s->value.opt_value; }

int rad_solution_should_abstain(const rad_solution* s) {
  return s->value.should_abstain ? 1 : 0;
}

rad_status rad_solution_probs(const rad_solution* s, double* buf, size_t buflen) {
  return guarded([&] {
    rad::require(buf != nullptr && buflen >= s->value.probs.size(),
                 rad::Errc::out_of_range, "probability buffer too small");
    std::memcpy(buf, s->value.probs.data(), s->value.probs.size() * sizeof(double));
  });
}

void rad_solution_free(rad_solution* s) { delete s; }

rad_status rad_default_w(double m, size_t n, double* out) {
  return guarded([&] {
    rad::require(out != nullptr, rad::Errc::out_of_range, "out is null");
    *out = rad::default_w(m, n);
  });
}

rad_status rad_game_value(const double* gains, size_t n, const double* losses,
                          double m, const double* probs, double* out) {
  return guarded([&] {
    rad::require(out != nullptr && probs != nullptr, rad::Errc::out_of_range,
                 "null argument");
    auto instance = make_instance(gains, n, losses, m);
    *out = rad::game_value(instance, {probs, n});
  });
}

rad_status rad_build_certificate(const double* gains, size_t n, const double* losses,
                                 double m, const rad_solution* solution,
                                 rad_certificate** out) {
  return guarded([&] {
    rad::require(out != nullptr && solution != nullptr, rad::Errc::out_of_range,
                 "null argument");
    auto instance = make_instance(gains, n, losses, m);
    *out = new rad_certificate{rad::build_certificate(instance, solution->value)};
  });
}

double rad_certificate_upper_bound(const rad_certificate* c) {
  return c->value.upper_bound;
}

double rad_certificate_mass_residual(const rad_certificate* c) {
  return c->value.mass_residual;
}

double rad_certificate_gap(const rad_certificate* c) { return c->value.gap; }

rad_status rad_certificate_mask(const rad_certificate* c, double* buf, size_t buflen) {
  return guarded([&] {
    rad::require(buf != nullptr && buflen >= c->value.mask_values.size(),
                 rad::Errc::out_of_range, "mask buffer too small");
    std::memcpy(buf, c->value.mask_values.data(),
                c->value.mask_values.size() * sizeof(double));
  });
}

void rad_certificate_free(rad_certificate* c) { delete c; }

rad_status rad_verify(const double* gains, size_t n, const double* losses, double m,
                      const rad_solution* solution, double tol, rad_verdict* verdict,
                      double* gap, char* reason, size_t reason_len) {
  return guarded([&] {
    rad::require(verdict != nullptr && solution != nullptr, rad::Errc::out_of_range,
                 "null argument");
    auto instance = make_instance(gains, n, losses, m);
    const rad::Verdict v = rad::verify(instance, solution->value, tol);
    switch (v.kind) {
      case rad::Verdict::Kind::optimal: *verdict = RAD_VERDICT_OPTIMAL; break;
      case rad::Verdict::Kind::suboptimal: *verdict = RAD_VERDICT_SUBOPTIMAL; break;
      case rad::Verdict::Kind::infeasible: *verdict = RAD_VERDICT_INFEASIBLE; break;
    }
    if (gap != nullptr) *gap = v.gap;
    if (reason != nullptr && reason_len > 0) {
      const std::size_t len = std::min(v.reason.size(), reason_len - 1);
      std::memcpy(reason, v.reason.data(), len);
      reason[len] = '\0';
    }
  });
}

rad_status rad_grid_oracle(const double* gains, size_t n, const double* losses,
                           double m, double step, double* best_value,
                           uint64_t* evaluations) {
  return guarded([&] {
    rad::require(best_value != nullptr, rad::Errc::out_of_range, "out is null");
    auto instance = make_instance(gains, n, losses, m);
    const rad::OracleResult result = rad::grid_oracle(instance, step);
    *best_value = result.best_value;
    if (evaluations != nullptr) *evaluations = result.evaluations;
  });
}

rad_status rad_plan_batch(const double* probs, size_t n, int64_t b,
                          rad_plan_mode mode, double* q_out, double* effective_total) {
  return guarded([&] {
    rad::require(probs != nullptr && q_out != nullptr, rad::Errc::out_of_range,
                 "null argument");
    const rad::BatchPlan plan = rad::plan_batch(
        {probs, n}, b,
        mode == RAD_PLAN_PAPER_CAP ? rad::PlanMode::paper_cap
                                   : rad::PlanMode::water_fill);
    std::memcpy(q_out, plan.q.data(), plan.q.size() * sizeof(double));
    if (effective_total != nullptr) *effective_total = plan.effective_total;
  });
}

rad_status rad_max_safe_batch(const double* probs, size_t n, int64_t* out) {
  return guarded([&] {
    rad::require(probs != nullptr && out != nullptr, rad::Errc::out_of_range,
                 "null argument");
    *out = rad::max_safe_batch({probs, n});
  });
}

rad_status rad_dep_round(const double* q, size_t n, uint64_t seed, size_t* idx_out,
                         size_t idx_cap, size_t* out_count) {
  return guarded([&] {
    rad::require(q != nullptr, rad::Errc::out_of_range, "q is null");
    const rad::BatchSample sample = rad::dep_round({q, n}, seed);
    copy_indices(sample.indices, idx_out, idx_cap, out_count);
  });
}

rad_status rad_bernoulli_round(const double* q, size_t n, uint64_t seed,
                               size_t* idx_out, size_t idx_cap, size_t* out_count) {
  return guarded([&] {
    rad::require(q != nullptr, rad::Errc::out_of_range, "q is null");
    const rad::BatchSample sample = rad::bernoulli_round({q, n}, seed);
    copy_indices(sample.indices, idx_out, idx_cap, out_count);
  });
}

rad_status rad_margin(const double* prediction, size_t k, double* out) {
  return guarded([&] {
    rad::require(prediction != nullptr && out != nullptr, rad::Errc::out_of_range,
                 "null argument");
    *out = rad::margin({prediction, k});
  });
}

rad_status rad_margin_gain(const double* prediction, size_t k, double* out) {
  return guarded([&] {
    rad::require(prediction != nullptr && out != nullptr, rad::Errc::out_of_range,
                 "null argument");
    *out = rad::margin_gain({prediction, k});
  });
}

rad_status rad_entropy_gain(const double* prediction, size_t k, double* out) {
  return guarded([&] {
    rad::require(prediction != nullptr && out != nullptr, rad::Errc::out_of_range,
                 "null argument");
    *out = rad::entropy_gain({prediction, k});
  });
}

rad_status rad_estimate_m(const int* predicted, const int* actual, size_t k,
                          size_t pool_size, double delta, int conservative,
                          char** json_out) {
  return guarded([&] {
    rad::require(predicted != nullptr && actual != nullptr && json_out != nullptr,
                 rad::Errc::out_of_range, "null argument");
    const rad::MislabelEstimate estimate = rad::estimate_m(
        {predicted, k}, {actual, k}, pool_size, delta, conservative != 0);
    nlohmann::json doc{{"schema_version", 1},
                       {"kind", "mislabel_estimate"},
                       {"m_hat", estimate.m_hat},
                       {"err_rate", estimate.err_rate},
                       {"pool_size", estimate.pool_size},
                       {"validation_size", estimate.validation_size},
                       {"delta", estimate.delta},
                       {"bound", estimate.bound},
                       {"conservative", conservative != 0}};
    *json_out = copy_string(rad::dump_canonical(doc));
  });
}

rad_status rad_shrink_m(double m_hat, double epsilon, double* out) {
  return guarded([&] {
    rad::require(out != nullptr, rad::Errc::out_of_range, "out is null");
    *out = rad::shrink_m(m_hat, epsilon);
  });
}

rad_status rad_simulate_game(const char* config_json, char** trace_json,
                             char** rounds_csv) {
  return guarded([&] {
    rad::require(config_json != nullptr && trace_json != nullptr,
                 rad::Errc::out_of_range, "null argument");
    nlohmann::json doc = nlohmann::json::parse(config_json, nullptr, false);
    rad::require(!doc.is_discarded(), rad::Errc::io_error, "config is not valid JSON");
    const rad::GameConfig config = rad::parse_game_config(doc);
    const rad::GameTrace trace = rad::run_game(config);
    *trace_json = copy_string(rad::dump_canonical(rad::game_trace_to_json(trace)));
    if (rounds_csv != nullptr) *rounds_csv = copy_string(rad::game_trace_to_csv(trace));
  });
}

rad_status rad_simulate_distill(const char* config_json, char** trace_json,
                                char** iters_csv) {
  return guarded([&] {
    rad::require(config_json != nullptr && trace_json != nullptr,
                 rad::Errc::out_of_range, "null argument");
    nlohmann::json doc = nlohmann::json::parse(config_json, nullptr, false);
    rad::require(!doc.is_discarded(), rad::Errc::io_error, "config is not valid JSON");
    const rad::DistillConfig config = rad::parse_distill_config(doc);
    const rad::DistillTrace trace = rad::run_distillation(config);
    *trace_json = copy_string(rad::dump_canonical(rad::distill_trace_to_json(trace)));
    if (iters_csv != nullptr) *iters_csv = copy_string(rad::distill_trace_to_csv(trace));
  });
}

rad_status rad_bench_solve(const uint64_t* sizes, size_t count, int repeats,
                           uint64_t seed, char** csv_out) {
  return guarded([&] {
    rad::require(sizes != nullptr && count > 0 && csv_out != nullptr,
                 rad::Errc::out_of_range, "null argument");
    rad::require(repeats >= 1, rad::Errc::config_error, "repeats must be at least 1");

    std::string csv = "n,median_seconds,repeats\n";
    char line[96];
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t n = sizes[i];
      rad::require(n >= 1, rad::Errc::config_error, "instance size must be positive");
      rad::Rng rng(rad::derive_seed(seed, i));
      std::vector<double> gains(n);
      for (double& g : gains) g = rng.uniform(0.01, 1.0);
      const double m = 0.2 * static_cast<double>(n);

      std::vector<double> times(repeats);
      for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        const rad::SamplerSolution solution =
            rad::solve_relative(gains, m >= static_cast<double>(n) ? 0.0 : m, 0.5);
        const auto t1 = std::chrono::steady_clock::now();
        times[r] = std::chrono::duration<double>(t1 - t0).count();
        rad::require(solution.k_star >= 1, rad::Errc::internal, "empty solve");
      }
      std::sort(times.begin(), times.end());
      const double median = times[times.size() / 2];
      std::snprintf(line, sizeof(line), "%zu,%.9f,%d\n", n, median, repeats);
      csv += line;
    }
    *csv_out = copy_string(csv);
  });
}

rad_status rad_json_canonicalize(const char* json_text, char** out) {
  return guarded([&] {
    rad::require(json_text != nullptr && out != nullptr, rad::Errc::out_of_range,
                 "null argument");
    nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
    rad::require(!doc.is_discarded(), rad::Errc::io_error, "input is not valid JSON");
    *out = copy_string(rad::dump_canonical(doc));
  });
}

}  // extern "C"
