#pragma once

#include <array>
#include <functional>

namespace hillgate {

// Composite 8-point Gauss-Legendre on [a, b] with n_panels equal panels.
inline double gauss_legendre(const std::function<double(double)>& f, double a, double b,
                             int n_panels) {
  static const std::array<double, 4> xs = {0.1834346424956498, 0.5255324099163290,
                                           0.7966664774136267, 0.9602898564975363};
  static const std::array<double, 4> ws = {0.3626837833783620, 0.3137066458778873,
                                           0.2223810344533745, 0.1012285362903763};
  const double h = (b - a) / n_panels;
  double total = 0.0;
  for (int k = 0; k < n_panels; ++k) {
    const double mid = a + (k + 0.5) * h;
    const double half = 0.5 * h;
    double s = 0.0;
    for (int i = 0; i < 4; ++i)
      s += ws[i] * (f(mid + half * xs[i]) + f(mid - half * xs[i]));
    total += half * s;
  }
  return total;
}

}  // namespace hillgate
