#pragma once

// Independent evaluation of the error function for pinning the library's
// entry point: Maclaurin series on the central range, Lentz continued
// fraction for the complementary function on the tails. Shares nothing with
// the production code (which delegates to libm).

#include <cmath>
#include <cstdlib>
#include <limits>

namespace testsupport {

inline double erf_series(double x) {
  // erf(x) = (2/sqrt(pi)) * sum_n (-1)^n x^(2n+1) / (n! (2n+1))
  const double x2 = x * x;
  double term = x;  // n = 0 term before the 2/sqrt(pi) factor
  double sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= -x2 / n;
    const double contrib = term / (2.0 * n + 1.0);
    sum += contrib;
    if (std::abs(contrib) < 1e-18 * std::abs(sum)) break;
  }
  return 2.0 / std::sqrt(M_PI) * sum;
}

inline double erfc_continued_fraction(double x) {
  // erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
  // evaluated with the modified Lentz algorithm; valid for x > 0, accurate in
  // the regime x >= 2 used here.
  const double tiny = 1e-300;
  double f = x;
  double c = f;
  double d = 0.0;
  for (int n = 1; n < 400; ++n) {
    const double a = 0.5 * n;
    const double b = x;
    d = b + a * d;
    if (std::abs(d) < tiny) d = tiny;
    c = b + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double ratio = c * d;
    f *= ratio;
    if (std::abs(ratio - 1.0) < 1e-17) break;
  }
  return std::exp(-x * x) / std::sqrt(M_PI) / f;
}

inline double erf_oracle(double x) {
  if (x < 0.0) return -erf_oracle(-x);
  if (x <= 2.5) return erf_series(x);
  return 1.0 - erfc_continued_fraction(x);
}

}  // namespace testsupport
