#include "core/errors.hpp"

namespace rad {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::ok: return "ok";
    case Errc::empty_instance: return "EmptyInstance";
    case Errc::invalid_budget: return "InvalidBudget";
    case Errc::invalid_weight: return "InvalidWeight";
    case Errc::invalid_loss: return "InvalidLoss";
    case Errc::non_finite_input: return "NonFiniteInput";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::not_a_distribution: return "NotADistribution";
    case Errc::invalid_batch: return "InvalidBatch";
    case Errc::non_integral_total: return "NonIntegralTotal";
    case Errc::out_of_range: return "OutOfRange";
    case Errc::too_large: return "TooLarge";
    case Errc::invalid_step: return "InvalidStep";
    case Errc::too_few_classes: return "TooFewClasses";
    case Errc::not_normalized: return "NotNormalized";
    case Errc::empty_validation: return "EmptyValidation";
    case Errc::config_error: return "ConfigError";
    case Errc::budget_exhausted: return "BudgetExhausted";
    case Errc::pool_exhausted: return "PoolExhausted";
    case Errc::non_finite_loss: return "NonFiniteLoss";
    case Errc::io_error: return "IoError";
    case Errc::internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace rad
