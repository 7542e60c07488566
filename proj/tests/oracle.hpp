#pragma once

// Independent reference computations for the tests. Nothing here calls the library.

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

/// Composite Simpson on [a, b] with `panels` (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels = 4096) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// Scalar ARE f p + p f - p^2 g^2 / r + q = 0, stabilizing root.
inline double scalar_are(double f, double g, double q, double r) {
  return (f + std::sqrt(f * f + g * g * q / r)) * r / (g * g);
}

}  // namespace oracle
