#pragma once

// Relay channel model for the symmetric two-arm link: fiber loss per arm, an
// entangling-cloner noise injection per arm, and the resulting two-mode
// covariance seen by the key-rate analysis. Also the derived sweeps: rate vs
// distance and the tolerable excess noise found by root bisection.

#include <cmath>
#include <vector>

#include "errors.hpp"
#include "gaussian_info.hpp"

namespace mdicv {

struct ChannelParams {
  double total_distance_km = 0.0;     // end-to-end; each arm spans half
  double attenuation_db_per_km = 0.2;
  double excess_noise = 0.0;          // input-referred, shot-noise units
  double modulation_variance = 20.0;  // total variance V (> 1), shot-noise units
  double beta = 0.95;                 // reconciliation efficiency, (0, 1]
};

// Variance of the thermal environment mode that reproduces excess noise eps
// through a beam splitter of transmittance t, one value per arm.
struct ClonerNoise {
  double w1 = 1.0;
  double w2 = 1.0;
};

inline void validate(const ChannelParams& p) {
  if (!(p.total_distance_km >= 0.0))
    throw std::invalid_argument("ChannelParams: negative distance");
  if (!(p.attenuation_db_per_km >= 0.0))
    throw std::invalid_argument("ChannelParams: negative attenuation");
  if (!(p.excess_noise >= 0.0))
    throw std::invalid_argument("ChannelParams: negative excess noise");
  if (!(p.modulation_variance > 1.0))
    throw std::invalid_argument("ChannelParams: modulation variance must exceed 1");
  if (!(p.beta > 0.0) || p.beta > 1.0)
    throw std::invalid_argument("ChannelParams: beta outside (0, 1]");
}

// Fiber transmittance over one arm: T = 10^(-alpha * L_arm / 10).
inline double transmittance_from_distance(double arm_km,
                                          double attenuation_db_per_km) {
  if (!(arm_km >= 0.0) || !(attenuation_db_per_km >= 0.0))
    throw std::invalid_argument("transmittance_from_distance: negative input");
  return std::pow(10.0, -attenuation_db_per_km * arm_km / 10.0);
}

// Environment variance W = 1 + T*eps/(1-T). Diverges as T -> 1: pure added
// noise needs an infinitely hot, infinitely weakly coupled environment, so
// the lossless case must be handled by the caller via the limit form
// (1-T)*W == (1-T) + T*eps.
inline double cloner_variance(double transmittance, double excess_noise) {
  if (!(transmittance > 0.0) || transmittance >= 1.0)
    throw std::domain_error("cloner_variance: transmittance outside (0, 1)");
  if (!(excess_noise >= 0.0))
    throw std::domain_error("cloner_variance: negative excess noise");
  return 1.0 + transmittance * excess_noise / (1.0 - transmittance);
}

// Two-mode covariance of the effective state shared through the relay:
//   a = b = T*V + (1-T)*W,   c = sqrt(T1*T2*(V^2-1))    (symmetric arms).
// The lossless limit T = 1 is taken analytically: a = V + eps.
inline TwoModeCovariance build_covariance(const ChannelParams& p) {
  validate(p);
  const double t = transmittance_from_distance(p.total_distance_km / 2.0,
                                               p.attenuation_db_per_km);
  const double v = p.modulation_variance;
  double a;
  if (t >= 1.0) {
    a = v + p.excess_noise;
  } else {
    a = t * v + (1.0 - t) * cloner_variance(t, p.excess_noise);
  }
  const TwoModeCovariance cov{a, a, std::sqrt(t * t * (v * v - 1.0))};
  symplectic_eigenvalues(cov);  // internal consistency: must be physical
  return cov;
}

// One row of an asymptotic distance sweep.
struct AsymptoticPoint {
  double distance_km = 0.0;
  double transmittance_per_arm = 1.0;
  TwoModeCovariance cov;
  double mutual_info = 0.0;
  double holevo = 0.0;
  double key_rate = 0.0;
};

// Evaluate the asymptotic rate at each requested distance, in input order.
// The distance field of `p` is ignored in favor of the explicit grid.
inline std::vector<AsymptoticPoint> rate_vs_distance(
    const ChannelParams& p, const std::vector<double>& distances_km) {
  std::vector<AsymptoticPoint> out;
  out.reserve(distances_km.size());
  for (const double d : distances_km) {
    ChannelParams q = p;
    q.total_distance_km = d;
    AsymptoticPoint row;
    row.distance_km = d;
    row.transmittance_per_arm =
        transmittance_from_distance(d / 2.0, p.attenuation_db_per_km);
    row.cov = build_covariance(q);
    row.mutual_info = mutual_information(row.cov);
    row.holevo = holevo_bound(row.cov);
    row.key_rate = p.beta * row.mutual_info - row.holevo;
    out.push_back(row);
  }
  return out;
}

// Largest excess noise with non-negative asymptotic rate at the distance in
// `p` (whose own excess_noise field is ignored). Root-bisected until either
// |K| < 1e-12 or the bracket width falls below 1e-12.
inline double tolerable_excess_noise(const ChannelParams& p) {
  validate(p);
  const auto rate_at = [&p](double eps) {
    ChannelParams q = p;
    q.excess_noise = eps;
    return asymptotic_key_rate(build_covariance(q), p.beta);
  };
  if (rate_at(0.0) <= 0.0)
    throw no_positive_rate_error(
        "tolerable_excess_noise: rate non-positive even at zero noise");
  double lo = 0.0;
  double hi = 1.0;
  while (rate_at(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 100.0)
      throw numeric_error("tolerable_excess_noise: bracket growth exhausted");
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double k = rate_at(mid);
    if (std::abs(k) < 1e-12) return mid;
    (k > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace mdicv
