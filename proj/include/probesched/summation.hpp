#pragma once

#include <cmath>
#include <span>

namespace probesched {

// Neumaier-compensated sum in index order.
inline double compensated_sum(std::span<const double> values) noexcept {
  double sum = 0.0;
  double compensation = 0.0;
  for (double x : values) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      compensation += (sum - t) + x;
    } else {
      compensation += (x - t) + sum;
    }
    sum = t;
  }
  return sum + compensation;
}

}  // namespace probesched
