#pragma once

// Closed-form second-moment algebra for the two-arm relay protocol.
//
// Both parties modulate coherent states with independent centred Gaussians
// of per-quadrature variance v (their key data), send them through lossy
// and noisy arms to a central node that measures the joint quadratures
//   x_z = (x_1 - x_2)/sqrt(2),   p_z = (p_1 + p_2)/sqrt(2)
// and publishes the outcome. Each party then displaces its data by a gain k
// times the announcement, which turns the broadcast into positive x-x and
// negative p-p correlations between the two key strings.
//
// Every quantity below is the analytic counterpart of a sampled estimate in
// protocol_sim.hpp, so simulation output can be checked entry by entry.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include <mdicv/errors.hpp>
#include <mdicv/gaussian_info.hpp>

namespace mdicv {

// Symmetric covariance of (x_a, p_a, x_b, p_b, x_z, p_z).
using Matrix6 = std::array<std::array<double, 6>, 6>;

namespace detail {

// Maximize a unimodal function on [lo, hi] to the requested interval width.
template <class F>
inline double golden_section_max(F&& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

// Large-sample standard error of a sample covariance between jointly
// Gaussian variables with variances var_u, var_w and covariance cov_uw.
// With u == w this reduces to the usual var * sqrt(2/n).
inline double covariance_standard_error(double var_u, double var_w,
                                        double cov_uw, std::int64_t n) {
  if (n < 2) throw std::invalid_argument("covariance_standard_error: n < 2");
  return std::sqrt((var_u * var_w + cov_uw * cov_uw) /
                   static_cast<double>(n));
}

struct MomentAlgebra {
  // Inputs.
  double v_a = 0.0;          // per-quadrature modulation variance, party A
  double v_b = 0.0;          // per-quadrature modulation variance, party B
  double t1 = 1.0;           // arm transmittances
  double t2 = 1.0;
  double excess_noise = 0.0;

  // Derived second moments.
  double s_a = 0.0;   // per-quadrature variance of arm A at the node
  double s_b = 0.0;   // per-quadrature variance of arm B at the node
  double v_z = 0.0;   // variance of each announced quadrature
  double c_az = 0.0;  // cov(x_a, x_z) = cov(p_a, p_z)
  double c_bz = 0.0;  // -cov(x_b, x_z) = cov(p_b, p_z)

  static MomentAlgebra from_parameters(double v_a, double v_b, double t1,
                                       double t2, double excess_noise) {
    if (!(v_a >= 0.0) || !(v_b >= 0.0))
      throw std::invalid_argument("MomentAlgebra: negative modulation variance");
    if (!(t1 > 0.0) || t1 > 1.0 || !(t2 > 0.0) || t2 > 1.0)
      throw std::invalid_argument("MomentAlgebra: transmittance outside (0, 1]");
    if (!(excess_noise >= 0.0))
      throw std::invalid_argument("MomentAlgebra: negative excess noise");
    MomentAlgebra m;
    m.v_a = v_a;
    m.v_b = v_b;
    m.t1 = t1;
    m.t2 = t2;
    m.excess_noise = excess_noise;
    // One vacuum unit rides along with the signal; loss replaces signal with
    // vacuum; the excess noise is injected at the channel input.
    m.s_a = t1 * (v_a + 1.0) + (1.0 - t1) + t1 * excess_noise;
    m.s_b = t2 * (v_b + 1.0) + (1.0 - t2) + t2 * excess_noise;
    m.v_z = 0.5 * (m.s_a + m.s_b);
    m.c_az = std::sqrt(t1 / 2.0) * v_a;
    m.c_bz = std::sqrt(t2 / 2.0) * v_b;
    return m;
  }

  // Covariance of (x_a, p_a, x_b, p_b, x_z, p_z) before displacement.
  Matrix6 tripartite_covariance() const {
    Matrix6 g{};
    g[0][0] = g[1][1] = v_a;
    g[2][2] = g[3][3] = v_b;
    g[4][4] = g[5][5] = v_z;
    g[0][4] = g[4][0] = c_az;
    g[1][5] = g[5][1] = c_az;
    g[2][4] = g[4][2] = -c_bz;
    g[3][5] = g[5][3] = c_bz;
    return g;
  }

  // Post-displacement moments, exact quadratics in the gain. The chosen
  // displacement signs (x_a - k x_z, p_a - k p_z, x_b + k x_z, p_b - k p_z)
  // make both quadratures of each string identically distributed.
  double displaced_variance_a(double k) const {
    return v_a - 2.0 * k * c_az + k * k * v_z;
  }
  double displaced_variance_b(double k) const {
    return v_b - 2.0 * k * c_bz + k * k * v_z;
  }
  double displaced_covariance(double k) const {
    return k * (c_az + c_bz) - k * k * v_z;
  }

  // The displaced data strings treated as a symmetrized two-mode pair:
  // a and b carry the per-quadrature string variances, c the x-x covariance
  // (the p-p covariance is its negative).
  TwoModeCovariance effective_covariance(double k) const {
    return {displaced_variance_a(k), displaced_variance_b(k),
            displaced_covariance(k)};
  }

  // Objective maximized by the gain search: the two-string mutual
  // information once the strings are positively correlated, and the (then
  // negative) covariance itself before that, which rises toward the same
  // optimum and keeps the search direction well defined.
  double gain_objective(double k) const {
    const double c = displaced_covariance(k);
    if (c < 0.0) return c;
    return mutual_information(effective_covariance(k));
  }

  // Gain that maximizes the displaced x-x covariance; coincides with the
  // mutual-information maximizer when the two arms are balanced.
  double covariance_maximizing_gain() const {
    if (!(v_z > 0.0))
      throw degenerate_optimum_error("covariance_maximizing_gain: v_z == 0");
    return 0.5 * (c_az + c_bz) / v_z;
  }

  // Mutual-information-maximizing gain on k in [0, 4], to 1e-6.
  double optimal_gain() const {
    if (!(c_az + c_bz > 0.0))
      throw degenerate_optimum_error("optimal_gain: no data/announcement correlation");
    return detail::golden_section_max(
        [this](double k) { return gain_objective(k); }, 0.0, 4.0, 1e-6);
  }

  // Key rate predicted for the displaced strings at gain k.
  double predicted_key_rate(double k, double beta) const {
    return asymptotic_key_rate(effective_covariance(k), beta);
  }
};

}  // namespace mdicv
