#pragma once

#include <cmath>

namespace cisim::detail {

// x - sin x and sinh x - x without cancellation for small x.
inline double x_minus_sin(double x) {
  if (std::fabs(x) > 0.5) return x - std::sin(x);
  const double x2 = x * x;
  double term = x * x2 / 6.0, sum = 0.0;
  for (int k = 1; k < 12; ++k) {
    sum += term;
    term *= -x2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
  }
  return sum;
}

inline double sinh_minus_x(double x) {
  if (std::fabs(x) > 0.5) return std::sinh(x) - x;
  const double x2 = x * x;
  double term = x * x2 / 6.0, sum = 0.0;
  for (int k = 1; k < 12; ++k) {
    sum += term;
    term *= x2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
  }
  return sum;
}

}  // namespace cisim::detail
