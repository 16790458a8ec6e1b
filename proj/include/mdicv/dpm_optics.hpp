#pragma once

// Jones-calculus model of the reflective modulator arm: Faraday mirror,
// birefringent fiber round trip, and the two-arm dual-phase-modulator
// interferometer that synthesizes arbitrary complex amplitudes — including
// full Gaussian modulation — from phase shifts alone.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace mdicv {

using complexd = std::complex<double>;

struct JonesVector {
  complexd ex{0.0, 0.0};
  complexd ey{0.0, 0.0};
};

// Row-major 2x2 complex operator on Jones vectors.
struct JonesMatrix {
  complexd xx{0.0, 0.0}, xy{0.0, 0.0};
  complexd yx{0.0, 0.0}, yy{0.0, 0.0};
};

inline JonesMatrix jones_identity() {
  return {{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}};
}

inline JonesMatrix operator*(const JonesMatrix& l, const JonesMatrix& r) {
  return {l.xx * r.xx + l.xy * r.yx, l.xx * r.xy + l.xy * r.yy,
          l.yx * r.xx + l.yy * r.yx, l.yx * r.xy + l.yy * r.yy};
}

inline JonesVector operator*(const JonesMatrix& m, const JonesVector& v) {
  return {m.xx * v.ex + m.xy * v.ey, m.yx * v.ex + m.yy * v.ey};
}

inline JonesMatrix operator*(complexd s, const JonesMatrix& m) {
  return {s * m.xx, s * m.xy, s * m.yx, s * m.yy};
}

inline JonesVector operator*(complexd s, const JonesVector& v) {
  return {s * v.ex, s * v.ey};
}

inline JonesMatrix operator+(const JonesMatrix& l, const JonesMatrix& r) {
  return {l.xx + r.xx, l.xy + r.xy, l.yx + r.yx, l.yy + r.yy};
}

inline complexd det(const JonesMatrix& m) {
  return m.xx * m.yy - m.xy * m.yx;
}

// Mirror that reflects through a plane rotated by theta from the horizontal:
//   [  cos 2t  -sin 2t ]
//   [ -sin 2t  -cos 2t ].
// theta = pi/4 is the ideal Faraday mirror (polarization rotated 90 degrees
// over the reflection round trip); the matrix is an involution of determinant
// -1 for every theta.
inline JonesMatrix faraday_mirror(double theta) {
  const double c = std::cos(2.0 * theta);
  const double s = std::sin(2.0 * theta);
  return {{c, 0.0}, {-s, 0.0}, {-s, 0.0}, {-c, 0.0}};
}

enum class Direction { forward, backward };

// Birefringent fiber segment with eigenaxes rotated by +/-delta and
// ordinary/extraordinary phase retards phi_o, phi_e:
//   T(+delta) = R(delta) diag(e^{i phi_o}, e^{i phi_e}) R(-delta),
// traversed backward as T(-delta).
inline JonesMatrix birefringent_line(double delta, double phi_o, double phi_e,
                                     Direction dir) {
  const double d = dir == Direction::forward ? delta : -delta;
  const double c = std::cos(d);
  const double s = std::sin(d);
  const complexd po = std::polar(1.0, phi_o);
  const complexd pe = std::polar(1.0, phi_e);
  const JonesMatrix rot{{c, 0.0}, {-s, 0.0}, {s, 0.0}, {c, 0.0}};
  const JonesMatrix rot_back{{c, 0.0}, {s, 0.0}, {-s, 0.0}, {c, 0.0}};
  const JonesMatrix retard{po, {0.0, 0.0}, {0.0, 0.0}, pe};
  return rot * (retard * rot_back);
}

// Full fiber round trip against a mirror rotated by theta, as the explicit
// triple product T(-delta) * M(theta) * T(+delta). For the ideal mirror
// theta = pi/4 the birefringence cancels: the product collapses to
// e^{i(phi_o+phi_e)} * M(pi/4) for every (delta, phi_o, phi_e). A tilted
// mirror breaks the cancellation unless phi_o = phi_e.
inline JonesMatrix roundtrip_rotated_element(double delta, double phi_o,
                                             double phi_e, double theta) {
  return birefringent_line(delta, phi_o, phi_e, Direction::backward) *
         (faraday_mirror(theta) *
          birefringent_line(delta, phi_o, phi_e, Direction::forward));
}

// One interferometer arm: attenuation in (0, 1] and a programmed phase.
struct ArmSetting {
  double attenuation = 1.0;
  double phase = 0.0;
};

// Jones operator of a single arm: varsigma * e^{i phi} * roundtrip.
inline JonesMatrix dpm_arm(const ArmSetting& arm, const JonesMatrix& roundtrip) {
  if (!(arm.attenuation > 0.0) || arm.attenuation > 1.0)
    throw std::invalid_argument("dpm_arm: attenuation outside (0, 1]");
  return std::polar(arm.attenuation, arm.phase) * roundtrip;
}

// Output of the two-arm interferometer on `input`:
//   (1/2) (M_arm1 + M_arm2) input.
inline JonesVector dpm_output(const JonesVector& input, const ArmSetting& arm1,
                              const ArmSetting& arm2,
                              const JonesMatrix& roundtrip) {
  return complexd(0.5, 0.0) *
         ((dpm_arm(arm1, roundtrip) + dpm_arm(arm2, roundtrip)) * input);
}

// Equal-loss factored form of the same output:
//   varsigma * e^{i(phi1+phi2)/2} * cos((phi1-phi2)/2) * roundtrip * input.
// The common phase carries the synthesized phase, the half-difference cosine
// the synthesized amplitude.
inline JonesVector dpm_output_equal_loss(const JonesVector& input,
                                         double varsigma, double phi1,
                                         double phi2,
                                         const JonesMatrix& roundtrip) {
  if (!(varsigma > 0.0) || varsigma > 1.0)
    throw std::invalid_argument("dpm_output_equal_loss: attenuation outside (0, 1]");
  const complexd factor = std::polar(varsigma, 0.5 * (phi1 + phi2)) *
                          std::cos(0.5 * (phi1 - phi2));
  return factor * (roundtrip * input);
}

struct PhasePair {
  double phi1 = 0.0;
  double phi2 = 0.0;
};

// Phase pair driving the two arms so the interferometer emits the requested
// complex amplitude: common mode sets the phase, differential mode the
// amplitude via cos((phi1-phi2)/2) = target / (varsigma * input_amplitude).
// Targets beyond the reachable radius are rejected; an amplitude of zero
// leaves the common phase unconstrained (the target's phase is still used).
inline PhasePair synthesize_phases(double target_amplitude, double target_phase,
                                   double varsigma, double input_amplitude) {
  if (!(target_amplitude >= 0.0))
    throw std::invalid_argument("synthesize_phases: negative amplitude");
  if (!(varsigma > 0.0) || varsigma > 1.0)
    throw std::invalid_argument("synthesize_phases: attenuation outside (0, 1]");
  if (!(input_amplitude > 0.0))
    throw std::invalid_argument("synthesize_phases: non-positive input");
  double ratio = target_amplitude / (varsigma * input_amplitude);
  if (ratio > 1.0) {
    if (ratio > 1.0 + 1e-12)
      throw reachability_error("synthesize_phases: target exceeds reachable amplitude");
    ratio = 1.0;
  }
  const double half_diff = std::acos(ratio);
  return {target_phase + half_diff, target_phase - half_diff};
}

struct ModulationSample {
  double phi1 = 0.0;
  double phi2 = 0.0;
  complexd amplitude{0.0, 0.0};  // realized through the equal-loss form
};

struct ModulationRun {
  std::vector<ModulationSample> samples;
  std::int64_t redraws = 0;       // targets outside the reachable radius
  double input_amplitude = 0.0;
  double varsigma = 1.0;
};

// Draw `count` Gaussian targets (each quadrature of the complex amplitude
// i.i.d. normal with variance v_mod), synthesize the phase pairs, and record
// the amplitudes the interferometer actually emits. The input amplitude is
// set to the 6-sigma radius of the target distribution; the vanishing tail
// beyond it is redrawn (and counted). Deterministic for a given seed.
inline ModulationRun gaussian_modulation_via_dpm(double v_mod,
                                                 std::int64_t count,
                                                 std::uint64_t seed) {
  if (!(v_mod > 0.0))
    throw std::invalid_argument("gaussian_modulation_via_dpm: v_mod <= 0");
  if (count < 1)
    throw std::invalid_argument("gaussian_modulation_via_dpm: count < 1");
  ModulationRun run;
  run.varsigma = 1.0;
  run.input_amplitude = 6.0 * std::sqrt(v_mod);
  run.samples.reserve(static_cast<size_t>(count));
  GaussianStream gauss(stream_seed(seed, 0));
  const double sigma = std::sqrt(v_mod);
  const double reach = run.varsigma * run.input_amplitude;
  for (std::int64_t i = 0; i < count; ++i) {
    double re = 0.0, im = 0.0, amp = 0.0;
    for (;;) {
      re = gauss.next(sigma);
      im = gauss.next(sigma);
      amp = std::hypot(re, im);
      if (amp <= reach) break;
      ++run.redraws;
    }
    const double phase = std::atan2(im, re);
    const PhasePair phases =
        synthesize_phases(amp, phase, run.varsigma, run.input_amplitude);
    const complexd realized =
        std::polar(run.varsigma * run.input_amplitude,
                   0.5 * (phases.phi1 + phases.phi2)) *
        std::cos(0.5 * (phases.phi1 - phases.phi2));
    run.samples.push_back({phases.phi1, phases.phi2, realized});
  }
  return run;
}

}  // namespace mdicv
