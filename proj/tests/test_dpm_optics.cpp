#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include <mdicv/dpm_optics.hpp>

using Catch::Matchers::WithinAbs;
using mdicv::complexd;
using mdicv::JonesMatrix;
using mdicv::JonesVector;

namespace {

double max_entry_diff(const JonesMatrix& l, const JonesMatrix& r) {
  return std::max({std::abs(l.xx - r.xx), std::abs(l.xy - r.xy),
                   std::abs(l.yx - r.yx), std::abs(l.yy - r.yy)});
}

double intensity(const JonesVector& v) {
  return std::norm(v.ex) + std::norm(v.ey);
}

}  // namespace

TEST_CASE("mirror matrix basics") {
  const auto ideal = mdicv::faraday_mirror(M_PI / 4.0);
  CHECK_THAT(std::abs(ideal.xx), WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::abs(ideal.yy), WithinAbs(0.0, 1e-15));
  CHECK_THAT(ideal.xy.real(), WithinAbs(-1.0, 1e-15));
  CHECK_THAT(ideal.yx.real(), WithinAbs(-1.0, 1e-15));

  std::mt19937_64 rng(0xabc123u);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  for (int i = 0; i < 50; ++i) {
    const auto m = mdicv::faraday_mirror(angle(rng));
    // Reflecting twice restores the field; the matrix flips orientation.
    CHECK(max_entry_diff(m * m, mdicv::jones_identity()) < 1e-15);
    CHECK_THAT(mdicv::det(m).real(), WithinAbs(-1.0, 1e-15));
    CHECK_THAT(mdicv::det(m).imag(), WithinAbs(0.0, 1e-15));
  }
}

TEST_CASE("birefringent line basics") {
  // No axis rotation: pure retarder.
  const auto plain = mdicv::birefringent_line(0.0, 0.7, -0.3,
                                              mdicv::Direction::forward);
  CHECK(std::abs(plain.xx - std::polar(1.0, 0.7)) < 1e-15);
  CHECK(std::abs(plain.yy - std::polar(1.0, -0.3)) < 1e-15);
  CHECK(std::abs(plain.xy) < 1e-15);
  CHECK(std::abs(plain.yx) < 1e-15);

  std::mt19937_64 rng(0xdef456u);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  for (int i = 0; i < 50; ++i) {
    const double d = angle(rng), po = angle(rng), pe = angle(rng);
    // The backward pass equals the forward pass with the axis angle negated.
    const auto fwd = mdicv::birefringent_line(-d, po, pe,
                                              mdicv::Direction::forward);
    const auto bwd = mdicv::birefringent_line(d, po, pe,
                                              mdicv::Direction::backward);
    CHECK(max_entry_diff(fwd, bwd) < 1e-15);
    // Lossless element: intensity preserved on arbitrary input.
    const JonesVector in{{angle(rng), angle(rng)}, {angle(rng), angle(rng)}};
    const auto out = mdicv::birefringent_line(d, po, pe,
                                              mdicv::Direction::forward) *
                     in;
    CHECK_THAT(intensity(out), WithinAbs(intensity(in), 1e-12));
  }
}

TEST_CASE("round trip against the ideal mirror cancels birefringence") {
  std::mt19937_64 rng(0x900dbeefu);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  const auto ideal = mdicv::faraday_mirror(M_PI / 4.0);
  for (int i = 0; i < 300; ++i) {
    const double d = angle(rng), po = angle(rng), pe = angle(rng);
    const auto trip = mdicv::roundtrip_rotated_element(d, po, pe, M_PI / 4.0);
    const auto expected = std::polar(1.0, po + pe) * ideal;
    REQUIRE(max_entry_diff(trip, expected) < 1e-13);
  }
}

TEST_CASE("a tilted mirror does not cancel birefringence") {
  const double theta = 0.3;  // away from pi/4
  const auto trip = mdicv::roundtrip_rotated_element(0.4, 0.7, -0.2, theta);
  const auto phase_only =
      std::polar(1.0, 0.7 + (-0.2)) * mdicv::faraday_mirror(theta);
  CHECK(max_entry_diff(trip, phase_only) > 1e-3);
  // ...unless the two retards coincide, where any mirror angle survives.
  const auto equal_retard =
      mdicv::roundtrip_rotated_element(0.4, 0.55, 0.55, theta);
  const auto expected =
      std::polar(1.0, 1.1) * mdicv::faraday_mirror(theta);
  CHECK(max_entry_diff(equal_retard, expected) < 1e-13);
}

TEST_CASE("two-arm output equals the factored equal-loss form") {
  std::mt19937_64 rng(0x12e4u);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  std::uniform_real_distribution<double> att(0.05, 1.0);
  std::uniform_real_distribution<double> amp(-2.0, 2.0);
  for (int i = 0; i < 300; ++i) {
    const double varsigma = att(rng);
    const double phi1 = angle(rng), phi2 = angle(rng);
    const auto trip = mdicv::roundtrip_rotated_element(
        angle(rng), angle(rng), angle(rng), M_PI / 4.0);
    const JonesVector in{{amp(rng), amp(rng)}, {amp(rng), amp(rng)}};
    const auto full = mdicv::dpm_output(in, {varsigma, phi1}, {varsigma, phi2},
                                        trip);
    const auto factored =
        mdicv::dpm_output_equal_loss(in, varsigma, phi1, phi2, trip);
    REQUIRE(std::abs(full.ex - factored.ex) < 1e-13);
    REQUIRE(std::abs(full.ey - factored.ey) < 1e-13);
  }
}

TEST_CASE("unequal arm losses are supported by the general form") {
  const JonesVector in{{1.0, 0.0}, {0.0, 0.0}};
  const auto out = mdicv::dpm_output(in, {0.25, 0.0}, {0.75, M_PI},
                                     mdicv::jones_identity());
  // (0.25 - 0.75)/2 = -0.25 on the x component.
  CHECK_THAT(out.ex.real(), WithinAbs(-0.25, 1e-15));
  CHECK_THAT(out.ex.imag(), WithinAbs(0.0, 1e-15));
  CHECK_THROWS_AS(
      mdicv::dpm_output(in, {0.0, 0.0}, {0.5, 0.0}, mdicv::jones_identity()),
      std::invalid_argument);
  CHECK_THROWS_AS(
      mdicv::dpm_output(in, {0.5, 0.0}, {1.5, 0.0}, mdicv::jones_identity()),
      std::invalid_argument);
}

TEST_CASE("phase synthesis round trip") {
  std::mt19937_64 rng(0xfadedu);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> att(0.1, 1.0);
  const double input_amplitude = 2.0;
  const JonesVector in{{input_amplitude, 0.0}, {0.0, 0.0}};
  for (int i = 0; i < 200; ++i) {
    const double varsigma = att(rng);
    const double target_amp = u01(rng) * varsigma * input_amplitude;
    const double target_phase = angle(rng);
    const auto phases = mdicv::synthesize_phases(target_amp, target_phase,
                                                 varsigma, input_amplitude);
    const auto out = mdicv::dpm_output_equal_loss(
        in, varsigma, phases.phi1, phases.phi2, mdicv::jones_identity());
    const complexd target = std::polar(target_amp, target_phase);
    REQUIRE(std::abs(out.ex - target) < 1e-12);
    REQUIRE(std::abs(out.ey) < 1e-15);
  }
}

TEST_CASE("phase synthesis edge cases") {
  // Zero target: arms in anti-phase, output extinguished.
  const auto null_phases = mdicv::synthesize_phases(0.0, 1.3, 1.0, 2.0);
  CHECK_THAT(null_phases.phi1 - null_phases.phi2, WithinAbs(M_PI, 1e-12));
  const JonesVector in{{2.0, 0.0}, {0.0, 0.0}};
  const auto out = mdicv::dpm_output_equal_loss(
      in, 1.0, null_phases.phi1, null_phases.phi2, mdicv::jones_identity());
  CHECK(std::abs(out.ex) < 1e-12);

  // Boundary target: arms in phase.
  const auto full = mdicv::synthesize_phases(2.0, 0.4, 1.0, 2.0);
  CHECK_THAT(full.phi1, WithinAbs(full.phi2, 1e-12));

  // Beyond the boundary: rejected.
  CHECK_THROWS_AS(mdicv::synthesize_phases(2.0 + 1e-6, 0.0, 1.0, 2.0),
                  mdicv::reachability_error);
  CHECK_THROWS_AS(mdicv::synthesize_phases(1.0, 0.0, 0.4, 2.0),
                  mdicv::reachability_error);
  CHECK_THROWS_AS(mdicv::synthesize_phases(-0.1, 0.0, 1.0, 2.0),
                  std::invalid_argument);
}

TEST_CASE("phase-only Gaussian modulation statistics") {
  const double v_mod = 4.0;
  const std::int64_t count = 100'000;
  const auto run = mdicv::gaussian_modulation_via_dpm(v_mod, count, 42);
  REQUIRE(run.samples.size() == static_cast<size_t>(count));
  CHECK_THAT(run.input_amplitude, WithinAbs(12.0, 1e-15));
  CHECK(run.redraws <= 3);

  double sum_re = 0.0, sum_im = 0.0, sum_re2 = 0.0, sum_im2 = 0.0,
         sum_cross = 0.0;
  for (const auto& s : run.samples) {
    const double re = s.amplitude.real(), im = s.amplitude.imag();
    CHECK(std::hypot(re, im) <= run.input_amplitude * (1.0 + 1e-12));
    sum_re += re;
    sum_im += im;
    sum_re2 += re * re;
    sum_im2 += im * im;
    sum_cross += re * im;
  }
  const double n = static_cast<double>(count);
  const double mean_re = sum_re / n, mean_im = sum_im / n;
  const double var_re = sum_re2 / n - mean_re * mean_re;
  const double var_im = sum_im2 / n - mean_im * mean_im;
  const double cov = sum_cross / n - mean_re * mean_im;
  // 5 sigma_mean ~ 0.032 on the means; 5% guard on the variances at n = 1e5.
  CHECK_THAT(mean_re, WithinAbs(0.0, 0.04));
  CHECK_THAT(mean_im, WithinAbs(0.0, 0.04));
  CHECK_THAT(var_re, WithinAbs(v_mod, 0.05 * v_mod));
  CHECK_THAT(var_im, WithinAbs(v_mod, 0.05 * v_mod));
  CHECK_THAT(cov, WithinAbs(0.0, 0.1));
}

TEST_CASE("modulation samples drive the interferometer to their amplitude") {
  const auto run = mdicv::gaussian_modulation_via_dpm(2.5, 50, 7);
  const JonesVector in{{run.input_amplitude, 0.0}, {0.0, 0.0}};
  for (const auto& s : run.samples) {
    const auto out = mdicv::dpm_output(in, {1.0, s.phi1}, {1.0, s.phi2},
                                       mdicv::jones_identity());
    REQUIRE(std::abs(out.ex - s.amplitude) < 1e-12);
  }
}

TEST_CASE("modulation runs are seed-deterministic") {
  const auto a = mdicv::gaussian_modulation_via_dpm(3.0, 2000, 123);
  const auto b = mdicv::gaussian_modulation_via_dpm(3.0, 2000, 123);
  const auto c = mdicv::gaussian_modulation_via_dpm(3.0, 2000, 124);
  REQUIRE(a.samples.size() == b.samples.size());
  bool all_equal = true;
  bool any_diff_c = false;
  for (size_t i = 0; i < a.samples.size(); ++i) {
    all_equal = all_equal && a.samples[i].phi1 == b.samples[i].phi1 &&
                a.samples[i].phi2 == b.samples[i].phi2 &&
                a.samples[i].amplitude == b.samples[i].amplitude;
    any_diff_c = any_diff_c || a.samples[i].phi1 != c.samples[i].phi1;
  }
  CHECK(all_equal);
  CHECK(any_diff_c);
  CHECK_THROWS_AS(mdicv::gaussian_modulation_via_dpm(0.0, 10, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(mdicv::gaussian_modulation_via_dpm(1.0, 0, 1),
                  std::invalid_argument);
}
