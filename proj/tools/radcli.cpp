// Command-line surface for the robust soft-label sampler. All numerics go
// through the shared library's C API; this file only handles files, flags,
// and process exit codes.
//
// Exit codes: 0 ok, 1 I/O or parse error, 2 invalid configuration,
// 3 solve succeeded but the game value is negative (abstain), 4 verification
// failure.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rad/rad.h"

namespace {

constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;  // fixed; never wall clock

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitConfig = 2;
constexpr int kExitAbstain = 3;
constexpr int kExitVerification = 4;

struct CliError {
  int exit_code;
  std::string message;
};

[[noreturn]] void die(int exit_code, const std::string& message) {
  throw CliError{exit_code, message};
}

int exit_code_for(rad_status status) {
  switch (status) {
    case RAD_OK: return kExitOk;
    case RAD_ERR_IO: return kExitParse;
    default: return kExitConfig;
  }
}

void check_status(rad_status status) {
  if (status != RAD_OK) {
    die(exit_code_for(status),
        std::string(rad_status_name(status)) + ": " + rad_last_error());
  }
}

std::string owned_string(char* s) {
  std::string out = s == nullptr ? "" : s;
  rad_string_free(s);
  return out;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("RAD_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      die(kExitConfig, "RAD_SEED must be an unsigned integer");
    }
  }
  return kDefaultSeed;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die(kExitParse, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) die(kExitParse, "cannot write " + path);
  out << contents;
}

// Values file: either one float per line, or CSV with a header naming an
// index column ("index,gain" / "index,prob"). Indices are echoed in outputs.
struct ValueFile {
  std::vector<std::int64_t> index;
  std::vector<double> values;
};

ValueFile parse_value_file(const std::string& path) {
  const std::string text = read_file(path);
  ValueFile out;
  std::istringstream lines(text);
  std::string line;
  bool csv = false;
  bool first = true;
  while (std::getline(lines, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("index,", 0) == 0) {
        csv = true;
        continue;
      }
    }
    try {
      if (csv) {
        const auto comma = line.find(',');
        if (comma == std::string::npos) die(kExitParse, path + ": missing comma");
        out.index.push_back(std::stoll(line.substr(0, comma)));
        out.values.push_back(std::stod(line.substr(comma + 1)));
      } else {
        out.values.push_back(std::stod(line));
      }
    } catch (const CliError&) {
      throw;
    } catch (...) {
      die(kExitParse, path + ": cannot parse line '" + line + "'");
    }
  }
  if (out.values.empty()) die(kExitParse, path + ": no values found");
  if (out.index.empty()) {
    out.index.resize(out.values.size());
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      out.index[i] = static_cast<std::int64_t>(i);
    }
  }
  return out;
}

// Validation CSV: "predicted,true" header optional.
void parse_validation_csv(const std::string& path, std::vector<int>* predicted,
                          std::vector<int>* actual) {
  const std::string text = read_file(path);
  std::istringstream lines(text);
  std::string line;
  bool first = true;
  while (std::getline(lines, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.find("predicted") != std::string::npos) continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) die(kExitParse, path + ": missing comma");
    try {
      predicted->push_back(std::stoi(line.substr(0, comma)));
      actual->push_back(std::stoi(line.substr(comma + 1)));
    } catch (...) {
      die(kExitParse, path + ": cannot parse line '" + line + "'");
    }
  }
  if (predicted->empty()) die(kExitParse, path + ": no rows found");
}

std::string canonical(const nlohmann::json& doc) {
  char* out = nullptr;
  check_status(rad_json_canonicalize(doc.dump().c_str(), &out));
  return owned_string(out);
}

// One run record per solve/simulate/bench invocation; reruns with the same
// configuration reproduce the referenced outputs byte-for-byte (the record
// itself carries wall-clock timings and is exempt from that contract).
void write_run_record(const std::string& command, const std::vector<std::string>& argv,
                      std::uint64_t seed, const nlohmann::json& config,
                      const std::vector<std::string>& outputs, double wall_seconds,
                      const std::string& path) {
  nlohmann::json record{
      {"schema_version", 1},
      {"kind", "run_record"},
      {"command", command},
      {"argv", argv},
      {"seed", seed},
      {"version", rad_version()},
      {"config", config},
      {"outputs", outputs},
      {"wall_seconds", wall_seconds},
  };
  write_file(path, canonical(record) + "\n");
}

struct SolutionHandle {
  rad_solution* ptr = nullptr;
  ~SolutionHandle() { rad_solution_free(ptr); }
};

struct CertificateHandle {
  rad_certificate* ptr = nullptr;
  ~CertificateHandle() { rad_certificate_free(ptr); }
};

// Shared by solve and certify: loss flags resolve to an optional loss array
// aligned with the gains, plus the relative weight actually used (if any).
struct LossSpec {
  std::optional<double> w;  // "default" resolves against (m, n)
  bool w_is_default = false;
  std::string loss_file;
  bool zero_loss = false;

  std::vector<double> resolve(const std::vector<double>& gains, double m,
                              double* resolved_w) const {
    const int chosen = (w || w_is_default ? 1 : 0) + (loss_file.empty() ? 0 : 1) +
                       (zero_loss ? 1 : 0);
    if (chosen != 1) {
      die(kExitConfig, "choose exactly one of --w, --loss-file, --zero-loss");
    }
    std::vector<double> losses;
    if (zero_loss) {
      losses.assign(gains.size(), 0.0);
      if (resolved_w != nullptr) *resolved_w = 0.0;
    } else if (!loss_file.empty()) {
      const ValueFile file = parse_value_file(loss_file);
      if (file.values.size() != gains.size()) {
        die(kExitConfig, "loss file length does not match gains");
      }
      losses = file.values;
    } else {
      double weight = 0.0;
      if (w_is_default) {
        check_status(rad_default_w(m, gains.size(), &weight));
      } else {
        weight = *w;
      }
      losses.resize(gains.size());
      for (std::size_t i = 0; i < gains.size(); ++i) losses[i] = weight * gains[i];
      if (resolved_w != nullptr) *resolved_w = weight;
    }
    return losses;
  }
};

void add_loss_flags(CLI::App* cmd, LossSpec* spec) {
  cmd->add_option_function<std::string>(
         "--w",
         [spec](const std::string& value) {
           if (value == "default") {
             spec->w_is_default = true;
           } else {
             try {
               spec->w = std::stod(value);
             } catch (...) {
               die(kExitConfig, "--w must be a number or 'default'");
             }
           }
         },
         "Relative loss weight in [0,1], or 'default' for 1 - m/n");
  cmd->add_option("--loss-file", spec->loss_file, "Explicit per-point losses");
  cmd->add_flag("--zero-loss", spec->zero_loss, "No mislabeling penalty");
}

int cmd_solve(const std::vector<std::string>& argv, const std::string& gains_path,
              double m, const LossSpec& loss_spec, const std::string& out_path,
              std::optional<std::uint64_t> seed_flag) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t seed = resolve_seed(seed_flag);
  const ValueFile gains = parse_value_file(gains_path);
  double resolved_w = -1.0;
  const std::vector<double> losses = loss_spec.resolve(gains.values, m, &resolved_w);

  SolutionHandle solution;
  check_status(rad_solve_general(gains.values.data(), gains.values.size(),
                                 losses.data(), m, &solution.ptr));

  std::vector<double> probs(gains.values.size());
  check_status(rad_solution_probs(solution.ptr, probs.data(), probs.size()));

  std::size_t filtered = 0;
  for (double g : gains.values) {
    if (g <= 1e-12) ++filtered;
  }

  nlohmann::json doc{
      {"schema_version", 1},
      {"kind", "sampler_solution"},
      {"n", gains.values.size()},
      {"index", gains.index},
      {"probs", probs},
      {"k_star", rad_solution_support_size(solution.ptr)},
      {"opt_value", rad_solution_value(solution.ptr)},
      {"should_abstain", rad_solution_should_abstain(solution.ptr) != 0},
      {"m", m},
      {"filtered_out", filtered},
  };
  if (resolved_w >= 0.0) doc["w"] = resolved_w;
  const std::string text = canonical(doc) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_run_record("solve", argv, seed, doc["m"].is_number() ? nlohmann::json{{"m", m}} : nlohmann::json{},
                     {out_path}, wall, out_path + ".run.json");
  }
  return rad_solution_should_abstain(solution.ptr) != 0 ? kExitAbstain : kExitOk;
}

int cmd_certify(const std::string& gains_path, double m, const LossSpec& loss_spec,
                bool with_oracle, double step) {
  const ValueFile gains = parse_value_file(gains_path);
  const std::vector<double> losses = loss_spec.resolve(gains.values, m, nullptr);

  SolutionHandle solution;
  check_status(rad_solve_general(gains.values.data(), gains.values.size(),
                                 losses.data(), m, &solution.ptr));

  CertificateHandle cert;
  check_status(rad_build_certificate(gains.values.data(), gains.values.size(),
                                     losses.data(), m, solution.ptr, &cert.ptr));

  rad_verdict verdict;
  double gap = 0.0;
  char reason[512] = {0};
  check_status(rad_verify(gains.values.data(), gains.values.size(), losses.data(), m,
                          solution.ptr, 1e-9, &verdict, &gap, reason, sizeof(reason)));

  std::printf("opt_value      %.17g\n", rad_solution_value(solution.ptr));
  std::printf("upper_bound    %.17g\n", rad_certificate_upper_bound(cert.ptr));
  std::printf("gap            %.3e\n", rad_certificate_gap(cert.ptr));
  std::printf("mass_residual  %.3e\n", rad_certificate_mass_residual(cert.ptr));

  if (with_oracle) {
    if (gains.values.size() > 4) {
      die(kExitConfig, "--oracle requires n <= 4");
    }
    double best = 0.0;
    std::uint64_t evals = 0;
    check_status(rad_grid_oracle(gains.values.data(), gains.values.size(),
                                 losses.data(), m, step, &best, &evals));
    std::printf("oracle_best    %.17g  (step %.4g, %llu evaluations)\n", best, step,
                static_cast<unsigned long long>(evals));
    std::printf("oracle_gap     %.3e\n", rad_solution_value(solution.ptr) - best);
  }

  const char* verdict_name = verdict == RAD_VERDICT_OPTIMAL     ? "optimal"
                             : verdict == RAD_VERDICT_SUBOPTIMAL ? "suboptimal"
                                                                  : "infeasible";
  std::printf("verdict        %s", verdict_name);
  if (verdict != RAD_VERDICT_OPTIMAL) std::printf("  (%s)", reason);
  std::printf("\n");
  return verdict == RAD_VERDICT_OPTIMAL ? kExitOk : kExitVerification;
}

int cmd_sample(const std::string& probs_path, std::int64_t b, const std::string& mode,
               std::optional<std::uint64_t> seed_flag, const std::string& out_path) {
  const std::uint64_t seed = resolve_seed(seed_flag);
  const ValueFile probs = parse_value_file(probs_path);
  const std::size_t n = probs.values.size();

  std::vector<double> q(n);
  const rad_plan_mode plan_mode =
      mode == "bernoulli" ? RAD_PLAN_PAPER_CAP : RAD_PLAN_WATER_FILL;
  check_status(rad_plan_batch(probs.values.data(), n, b, plan_mode, q.data(), nullptr));

  std::vector<std::size_t> indices(n);
  std::size_t count = 0;
  if (mode == "depround") {
    check_status(rad_dep_round(q.data(), n, seed, indices.data(), n, &count));
  } else if (mode == "bernoulli") {
    check_status(rad_bernoulli_round(q.data(), n, seed, indices.data(), n, &count));
  } else {
    die(kExitConfig, "--mode must be depround or bernoulli");
  }

  std::string text;
  for (std::size_t i = 0; i < count; ++i) {
    text += std::to_string(probs.index[indices[i]]);
    text += '\n';
  }
  std::cout << text;
  if (!out_path.empty()) write_file(out_path, text);
  return kExitOk;
}

int cmd_estimate_m(const std::string& csv_path, std::size_t pool_size, double delta,
                   bool conservative, const std::string& out_path) {
  std::vector<int> predicted, actual;
  parse_validation_csv(csv_path, &predicted, &actual);
  char* json = nullptr;
  check_status(rad_estimate_m(predicted.data(), actual.data(), predicted.size(),
                              pool_size, delta, conservative ? 1 : 0, &json));
  const std::string text = owned_string(json) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
  return kExitOk;
}

int cmd_simulate(const std::string& kind, const std::vector<std::string>& argv,
                 const std::string& config_path, const std::string& out_prefix,
                 std::optional<std::uint64_t> seed_flag) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t seed = resolve_seed(seed_flag);

  nlohmann::json config = nlohmann::json::parse(read_file(config_path), nullptr, false);
  if (config.is_discarded()) die(kExitParse, config_path + " is not valid JSON");
  // A config without explicit seeds runs one trial on the resolved seed.
  if (!config.contains("seeds")) config["seeds"] = {seed};

  char* trace = nullptr;
  char* csv = nullptr;
  const rad_status status =
      kind == "game" ? rad_simulate_game(config.dump().c_str(), &trace, &csv)
                     : rad_simulate_distill(config.dump().c_str(), &trace, &csv);
  check_status(status);

  const std::string json_path = out_prefix + ".json";
  const std::string csv_path = out_prefix + ".csv";
  write_file(json_path, owned_string(trace) + "\n");
  write_file(csv_path, owned_string(csv));

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_run_record("simulate-" + kind, argv, seed, config, {json_path, csv_path}, wall,
                   out_prefix + ".run.json");
  std::printf("wrote %s and %s\n", json_path.c_str(), csv_path.c_str());
  return kExitOk;
}

int cmd_bench(const std::vector<std::string>& argv, std::vector<std::uint64_t> sizes,
              int repeats, std::optional<std::uint64_t> seed_flag,
              const std::string& out_path) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t seed = resolve_seed(seed_flag);
  if (sizes.empty()) die(kExitConfig, "--n requires at least one size");

  char* csv = nullptr;
  check_status(rad_bench_solve(sizes.data(), sizes.size(), repeats, seed, &csv));
  const std::string text = owned_string(csv);
  std::cout << text;
  if (!out_path.empty()) {
    write_file(out_path, text);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_run_record("bench", argv, seed,
                     nlohmann::json{{"n", sizes}, {"repeats", repeats}}, {out_path},
                     wall, out_path + ".run.json");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust soft-label sampling: minimax-optimal acquisition "
               "distributions with certificates, rounding, and simulators"};
  app.require_subcommand(1);

  std::vector<std::string> argv_copy(argv, argv + argc);

  // solve
  auto* solve = app.add_subcommand("solve", "Compute the optimal sampling distribution");
  std::string solve_gains, solve_out;
  double solve_m = 0.0;
  LossSpec solve_loss;
  std::optional<std::uint64_t> solve_seed;
  solve->add_option("gains", solve_gains, "Gains file (floats or index,gain CSV)")
      ->required();
  solve->add_option("--m", solve_m, "Adversary budget (mislabel count, may be real)")
      ->required();
  add_loss_flags(solve, &solve_loss);
  solve->add_option("--out", solve_out, "Write the solution JSON here");
  solve->add_option("--seed", solve_seed, "Seed recorded in the run record");

  // certify
  auto* certify = app.add_subcommand("certify", "Verify optimality by duality");
  std::string certify_gains;
  double certify_m = 0.0;
  LossSpec certify_loss;
  bool certify_oracle = false;
  double certify_step = 0.01;
  certify->add_option("gains", certify_gains, "Gains file")->required();
  certify->add_option("--m", certify_m, "Adversary budget")->required();
  add_loss_flags(certify, &certify_loss);
  certify->add_flag("--oracle", certify_oracle, "Also run the grid oracle (n <= 4)");
  certify->add_option("--step", certify_step, "Oracle grid step (default 0.01)");

  // sample
  auto* sample = app.add_subcommand("sample", "Draw a batch from a distribution");
  std::string sample_probs, sample_mode = "depround", sample_out;
  std::int64_t sample_b = 1;
  std::optional<std::uint64_t> sample_seed;
  sample->add_option("probs", sample_probs, "Distribution file")->required();
  sample->add_option("--b", sample_b, "Batch size")->required();
  sample->add_option("--mode", sample_mode, "depround (exact size) or bernoulli");
  sample->add_option("--seed", sample_seed, "Sampling seed");
  sample->add_option("--out", sample_out, "Also write indices here");

  // estimate-m
  auto* estimate = app.add_subcommand("estimate-m", "Estimate teacher mislabels");
  std::string estimate_csv, estimate_out;
  std::size_t estimate_pool = 0;
  double estimate_delta = 0.05;
  bool estimate_conservative = false;
  estimate->add_option("validation", estimate_csv, "CSV of predicted,true labels")
      ->required();
  estimate->add_option("--pool-size", estimate_pool, "Unlabeled pool size")->required();
  estimate->add_option("--delta", estimate_delta, "Failure probability (default 0.05)");
  estimate->add_flag("--conservative", estimate_conservative,
                     "Use the variance-free bound");
  estimate->add_option("--out", estimate_out, "Write the estimate JSON here");

  // simulate-game / simulate-distill
  auto* game = app.add_subcommand("simulate-game", "Adversarial realized-gain game");
  std::string game_config, game_out = "game_trace";
  std::optional<std::uint64_t> game_seed;
  game->add_option("config", game_config, "Game config JSON")->required();
  game->add_option("--out", game_out, "Output prefix (default game_trace)");
  game->add_option("--seed", game_seed, "Seed used when the config lists none");

  auto* distill = app.add_subcommand("simulate-distill", "Synthetic distillation loop");
  std::string distill_config, distill_out = "distill_trace";
  std::optional<std::uint64_t> distill_seed;
  distill->add_option("config", distill_config, "Distillation config JSON")->required();
  distill->add_option("--out", distill_out, "Output prefix (default distill_trace)");
  distill->add_option("--seed", distill_seed, "Seed used when the config lists none");

  // bench
  auto* bench = app.add_subcommand("bench", "Time the solver across sizes");
  std::vector<std::uint64_t> bench_sizes;
  int bench_repeats = 5;
  std::string bench_out;
  std::optional<std::uint64_t> bench_seed;
  bench->add_option("--n", bench_sizes, "Instance sizes")->required();
  bench->add_option("--repeats", bench_repeats, "Repeats per size (default 5)");
  bench->add_option("--seed", bench_seed, "Gain-generation seed");
  bench->add_option("--out", bench_out, "Write the timing CSV here");

  try {
    app.parse(argc, argv);
    if (solve->parsed()) {
      return cmd_solve(argv_copy, solve_gains, solve_m, solve_loss, solve_out,
                       solve_seed);
    }
    if (certify->parsed()) {
      return cmd_certify(certify_gains, certify_m, certify_loss, certify_oracle,
                         certify_step);
    }
    if (sample->parsed()) {
      return cmd_sample(sample_probs, sample_b, sample_mode, sample_seed, sample_out);
    }
    if (estimate->parsed()) {
      return cmd_estimate_m(estimate_csv, estimate_pool, estimate_delta,
                            estimate_conservative, estimate_out);
    }
    if (game->parsed()) {
      return cmd_simulate("game", argv_copy, game_config, game_out, game_seed);
    }
    if (distill->parsed()) {
      return cmd_simulate("distill", argv_copy, distill_config, distill_out,
                          distill_seed);
    }
    if (bench->parsed()) {
      return cmd_bench(argv_copy, bench_sizes, bench_repeats, bench_seed, bench_out);
    }
    return kExitConfig;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
}
