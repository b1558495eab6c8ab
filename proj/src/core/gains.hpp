#pragma once

#include <span>

#include "core/errors.hpp"

namespace rad {

// Class-probability vectors must be non-negative and sum to 1 within 1e-9.
void check_soft_prediction(std::span<const double> probs);

// Difference between the two largest class probabilities; in [0, 1].
double margin(std::span<const double> probs);

// Informativeness of a point under margin uncertainty: 1 - margin.
double margin_gain(std::span<const double> probs);

// Shannon entropy of the prediction (natural log, 0 log 0 := 0); in [0, log k].
double entropy_gain(std::span<const double> probs);

}  // namespace rad
