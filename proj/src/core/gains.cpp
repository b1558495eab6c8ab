#include "core/gains.hpp"

#include <cmath>

namespace rad {

void check_soft_prediction(std::span<const double> probs) {
  double total = 0.0;
  for (double p : probs) {
    require(std::isfinite(p), Errc::non_finite_input, "prediction must be finite");
    require(p >= -1e-12, Errc::not_normalized, "prediction has a negative entry");
    total += p;
  }
  require(std::fabs(total - 1.0) <= 1e-9, Errc::not_normalized,
          "prediction must sum to 1");
}

double margin(std::span<const double> probs) {
  require(probs.size() >= 2, Errc::too_few_classes, "margin needs at least 2 classes");
  check_soft_prediction(probs);
  double top1 = -1.0, top2 = -1.0;
  for (double p : probs) {
    if (p > top1) {
      top2 = top1;
      top1 = p;
    } else if (p > top2) {
      top2 = p;
    }
  }
  return top1 - top2;
}

double margin_gain(std::span<const double> probs) { return 1.0 - margin(probs); }

double entropy_gain(std::span<const double> probs) {
  check_soft_prediction(probs);
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

}  // namespace rad
