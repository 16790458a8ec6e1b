#pragma once

// Entropic quantities of two-mode Gaussian states in standard form, and the
// asymptotic secret key rate built from them. All variances are in shot-noise
// units (vacuum quadrature variance = 1); all entropies/rates are in bits.

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace mdicv {

// Two-mode covariance matrix in standard form
//   [ a*I2   c*Z  ]
//   [ c*Z    b*I2 ],   Z = diag(1, -1).
// a, b are the single-mode variances; c is the cross correlation and may
// carry either sign (the entropic quantities depend on c^2 only).
struct TwoModeCovariance {
  double a = 1.0;
  double b = 1.0;
  double c = 0.0;
};

// The two symplectic eigenvalues, ordered lambda1 >= lambda2.
struct SymplecticPair {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
};

// Physicality slack: the smallest symplectic eigenvalue may undershoot 1 by
// this much before the matrix is rejected, absorbing round-off from upstream
// floating-point assembly of the entries.
inline constexpr double kPhysicalityTol = 1e-9;

// Bosonic entropy function: von Neumann entropy of a thermal state with mean
// photon number x, in bits. Continuous at 0 with G(0) = 0.
inline double von_neumann_g(double x) {
  if (x < 0.0) throw std::domain_error("von_neumann_g: negative argument");
  if (x == 0.0) return 0.0;
  return (x + 1.0) * std::log2(x + 1.0) - x * std::log2(x);
}

// Symplectic eigenvalues of the standard-form matrix via the closed form
//   lambda^2 = (Delta +/- sqrt(Delta^2 - 4 det)) / 2,
// Delta = a^2 + b^2 - 2 c^2, det = a*b - c^2.
// For exactly symmetric states (a == b) the discriminant is an analytic zero;
// tiny negative round-off in [-1e-12, 0) is clamped to zero. Anything more
// negative, or an eigenvalue below 1 - kPhysicalityTol, rejects the matrix.
inline SymplecticPair symplectic_eigenvalues(const TwoModeCovariance& cov) {
  const double delta = cov.a * cov.a + cov.b * cov.b - 2.0 * cov.c * cov.c;
  const double det = cov.a * cov.b - cov.c * cov.c;
  double radicand = delta * delta - 4.0 * det * det;
  if (radicand < 0.0) {
    if (radicand < -1e-12)
      throw unphysical_covariance_error(
          "symplectic_eigenvalues: negative discriminant");
    radicand = 0.0;
  }
  const double root = std::sqrt(radicand);
  const double l1sq = 0.5 * (delta + root);
  const double l2sq = 0.5 * (delta - root);
  if (l1sq < 0.0 || l2sq < -1e-12)
    throw unphysical_covariance_error(
        "symplectic_eigenvalues: negative squared eigenvalue");
  SymplecticPair out;
  out.lambda1 = std::sqrt(std::max(l1sq, 0.0));
  out.lambda2 = std::sqrt(std::max(l2sq, 0.0));
  if (out.lambda2 < 1.0 - kPhysicalityTol)
    throw unphysical_covariance_error(
        "symplectic_eigenvalues: eigenvalue below vacuum");
  return out;
}

// Symplectic eigenvalue of mode B conditioned on a heterodyne measurement of
// mode A: lambda3 = b - c^2 / (a + 1).
inline double conditional_eigenvalue_heterodyne(const TwoModeCovariance& cov) {
  return cov.b - cov.c * cov.c / (cov.a + 1.0);
}

// Mutual information of the heterodyne-detected Gaussian pair:
//   I = log2( (b + 1) / (b + 1 - c^2/(a + 1)) ).
inline double mutual_information(const TwoModeCovariance& cov) {
  const double denom = cov.b + 1.0 - cov.c * cov.c / (cov.a + 1.0);
  if (denom <= 0.0)
    throw unphysical_covariance_error(
        "mutual_information: non-positive conditional variance");
  return std::log2((cov.b + 1.0) / denom);
}

namespace detail {
// G((lambda - 1)/2) with the physicality slack folded in: a lambda within
// kPhysicalityTol below 1 evaluates as exactly 1.
inline double g_of_symplectic(double lambda) {
  double x = 0.5 * (lambda - 1.0);
  if (x < 0.0 && x >= -0.5 * kPhysicalityTol) x = 0.0;
  return von_neumann_g(x);
}
}  // namespace detail

// Holevo bound on the eavesdropper information for collective attacks against
// reverse reconciliation with heterodyne detection:
//   chi = G((l1-1)/2) + G((l2-1)/2) - G((l3-1)/2).
inline double holevo_bound(const TwoModeCovariance& cov) {
  const SymplecticPair pair = symplectic_eigenvalues(cov);
  const double l3 = conditional_eigenvalue_heterodyne(cov);
  if (l3 < 1.0 - kPhysicalityTol)
    throw unphysical_covariance_error(
        "holevo_bound: conditional eigenvalue below vacuum");
  return detail::g_of_symplectic(pair.lambda1) +
         detail::g_of_symplectic(pair.lambda2) -
         detail::g_of_symplectic(l3);
}

// Asymptotic secret key rate K = beta * I - chi, bits per pulse.
// beta is the reconciliation efficiency, in (0, 1].
inline double asymptotic_key_rate(const TwoModeCovariance& cov, double beta) {
  if (!(beta > 0.0) || beta > 1.0)
    throw std::invalid_argument("asymptotic_key_rate: beta outside (0, 1]");
  return beta * mutual_information(cov) - holevo_bound(cov);
}

}  // namespace mdicv
