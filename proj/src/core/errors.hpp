#pragma once

#include <stdexcept>
#include <string>

namespace rad {

// Stable error identifiers. The C API exposes these as integer status codes,
// so the numbering must not change between releases.
enum class Errc : int {
  ok = 0,
  empty_instance = 1,
  invalid_budget = 2,
  invalid_weight = 3,
  invalid_loss = 4,
  non_finite_input = 5,
  dimension_mismatch = 6,
  not_a_distribution = 7,
  invalid_batch = 8,
  non_integral_total = 9,
  out_of_range = 10,
  too_large = 11,
  invalid_step = 12,
  too_few_classes = 13,
  not_normalized = 14,
  empty_validation = 15,
  config_error = 16,
  budget_exhausted = 17,
  pool_exhausted = 18,
  non_finite_loss = 19,
  io_error = 20,
  internal = 21,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, Errc code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace rad
