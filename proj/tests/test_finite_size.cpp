#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <mdicv/finite_size.hpp>

#include "support/erf_oracle.hpp"

using Catch::Matchers::WithinAbs;
using mdicv::ChannelParams;
using mdicv::EstimationMode;
using mdicv::FiniteSizeParams;

static ChannelParams defaults_at(double distance_km) {
  ChannelParams p;
  p.total_distance_km = distance_km;
  p.excess_noise = 0.001;
  return p;
}

TEST_CASE("erf oracle reproduces frozen high-precision values") {
  CHECK_THAT(testsupport::erf_oracle(0.5),
             WithinAbs(0.52049987781304654, 1e-14));
  CHECK_THAT(testsupport::erf_oracle(1.0),
             WithinAbs(0.84270079294971487, 1e-14));
  CHECK_THAT(testsupport::erf_oracle(3.0),
             WithinAbs(0.99997790950300141, 1e-14));
  CHECK_THAT(testsupport::erf_oracle(6.0),
             WithinAbs(0.99999999999999998, 1e-15));
  CHECK_THAT(testsupport::erf_oracle(-2.25),
             WithinAbs(-0.99853728341331885, 1e-14));
  CHECK(testsupport::erf_oracle(0.0) == 0.0);
}

TEST_CASE("error_function matches the oracle across [-6, 6]") {
  for (int i = -600; i <= 600; ++i) {
    const double x = i / 100.0;
    REQUIRE_THAT(mdicv::error_function(x),
                 WithinAbs(testsupport::erf_oracle(x), 1e-12));
  }
}

TEST_CASE("confidence coefficient solves the tail equation") {
  const double z2 = mdicv::confidence_coefficient(1e-2);
  CHECK_THAT(z2, WithinAbs(2.5758293035489008, 1e-9));
  const double z10 = mdicv::confidence_coefficient(1e-10);
  CHECK_THAT(z10, WithinAbs(6.4669510872405162, 1e-9));
  for (double eps : {1e-2, 1e-4, 1e-10}) {
    const double z = mdicv::confidence_coefficient(eps);
    CHECK_THAT(std::erfc(z / std::sqrt(2.0)), WithinAbs(eps, 1e-10 * eps + 1e-25));
  }
  // Larger failure probability -> looser bound.
  CHECK(mdicv::confidence_coefficient(0.5) <
        mdicv::confidence_coefficient(1e-3));
  CHECK_THROWS_AS(mdicv::confidence_coefficient(0.0), std::invalid_argument);
  CHECK_THROWS_AS(mdicv::confidence_coefficient(1.0), std::invalid_argument);
}

TEST_CASE("privacy amplification penalty") {
  const FiniteSizeParams f = mdicv::make_local(1);  // defaults for epsilons
  CHECK_THAT(mdicv::privacy_amp_penalty(10'000, f),
             WithinAbs(0.41612459645661652, 1e-12));
  CHECK_THAT(mdicv::privacy_amp_penalty(500'000, f),
             WithinAbs(0.058042198765389735, 1e-12));
  CHECK_THAT(mdicv::privacy_amp_penalty(1'000'000, f),
             WithinAbs(0.041014512588581927, 1e-12));
  CHECK_THAT(mdicv::privacy_amp_penalty(1'000'000'000'000LL, f),
             WithinAbs(4.0948140465246078e-05, 1e-17));
  CHECK(mdicv::privacy_amp_penalty(100, f) >
        mdicv::privacy_amp_penalty(1000, f));
  CHECK_THROWS_AS(mdicv::privacy_amp_penalty(0, f), std::invalid_argument);
}

TEST_CASE("worst-case estimation bounds at 10 km, half-megablock estimation") {
  const double eta =
      mdicv::transmittance_from_distance(5.0, 0.2);  // 0.7943282347242815
  const double z = mdicv::confidence_coefficient(1e-10);
  const auto wc = mdicv::worst_case_params(eta, 0.001, 500'000, 19.0, z);
  CHECK_THAT(wc.t_min, WithinAbs(0.88915194899537768, 1e-9));
  CHECK_THAT(wc.sigma2_max, WithinAbs(1.0137385041728877, 1e-9));
  CHECK_FALSE(wc.t_clamped);
  // The bounds straddle the true channel.
  CHECK(wc.t_min < std::sqrt(eta));
  CHECK(wc.sigma2_max > 1.0 + eta * 0.001);

  const auto cov = mdicv::worst_case_covariance(20.0, wc);
  CHECK_THAT(cov.a, WithinAbs(20.0, 1e-15));
  CHECK_THAT(cov.b, WithinAbs(16.825562272218462, 1e-8));
  CHECK_THAT(cov.c, WithinAbs(17.760796270790035, 1e-8));
  CHECK_THAT(mdicv::holevo_bound(cov), WithinAbs(4.0409225899138712, 1e-8));
}

TEST_CASE("worst-case transmittance clamps at zero for hopeless statistics") {
  const auto wc = mdicv::worst_case_params(0.01, 0.0, 4, 1.0, 6.5);
  CHECK(wc.t_min == 0.0);
  CHECK(wc.t_clamped);
  // Still produces a physical covariance (uncorrelated worst case).
  const auto cov = mdicv::worst_case_covariance(20.0, wc);
  CHECK(cov.c == 0.0);
}

TEST_CASE("finite-size key rate, both modes, frozen anchors") {
  const ChannelParams p = defaults_at(10.0);
  const double k_local = mdicv::finite_size_key_rate(
      p, mdicv::make_local(1'000'000), EstimationMode::local);
  CHECK_THAT(k_local, WithinAbs(-0.26727495787298207, 1e-9));
  const double k_conv = mdicv::finite_size_key_rate(
      p, mdicv::make_conventional(1'000'000), EstimationMode::conventional);
  CHECK_THAT(k_conv, WithinAbs(-0.69398193354627967, 1e-8));
  CHECK(k_local > k_conv);
}

TEST_CASE("local mode at a huge block approaches the asymptotic rate") {
  const ChannelParams p = defaults_at(5.0);
  const double k_asym =
      mdicv::asymptotic_key_rate(mdicv::build_covariance(p), p.beta);
  const double k_fini = mdicv::finite_size_key_rate(
      p, mdicv::make_local(1'000'000'000'000LL), EstimationMode::local);
  CHECK_THAT(k_fini, WithinAbs(k_asym, 1e-3));
  // With n = N the gap is exactly the penalty term.
  CHECK_THAT(k_asym - k_fini,
             WithinAbs(4.0948140465246078e-05, 1e-15));
}

TEST_CASE("mode/block-shape mismatches are rejected") {
  const ChannelParams p = defaults_at(5.0);
  CHECK_THROWS_AS(mdicv::finite_size_key_rate(
                      p, mdicv::make_conventional(1'000'000),
                      EstimationMode::local),
                  std::invalid_argument);
  CHECK_THROWS_AS(mdicv::finite_size_key_rate(p, mdicv::make_local(1'000'000),
                                              EstimationMode::conventional),
                  std::invalid_argument);
  CHECK_THROWS_AS(mdicv::make_conventional(999'999), std::invalid_argument);
  FiniteSizeParams bad = mdicv::make_local(100);
  bad.eps_pe = 0.0;
  CHECK_THROWS_AS(mdicv::finite_size_key_rate(p, bad, EstimationMode::local),
                  std::invalid_argument);
}

TEST_CASE("local mode dominates conventional mode across a grid") {
  const ChannelParams p = defaults_at(0.0);
  const std::vector<std::int64_t> blocks{10'000, 1'000'000, 100'000'000};
  const std::vector<double> distances{0.0, 1.0, 3.0, 5.0, 7.0};
  const auto rows = mdicv::finite_size_sweep(p, blocks, distances);
  REQUIRE(rows.size() == blocks.size() * 2 * distances.size());
  const size_t stride = distances.size();
  for (size_t nb = 0; nb < blocks.size(); ++nb) {
    const size_t base = nb * 2 * stride;
    for (size_t i = 0; i < stride; ++i) {
      const auto& local = rows[base + i];
      const auto& conv = rows[base + stride + i];
      REQUIRE(local.mode == EstimationMode::local);
      REQUIRE(conv.mode == EstimationMode::conventional);
      REQUIRE(local.distance_km == conv.distance_km);
      CHECK(local.key_rate >= conv.key_rate);
    }
  }
}

TEST_CASE("finite-size rate grows with block size") {
  const ChannelParams p = defaults_at(3.0);
  double prev = -1e9;
  for (std::int64_t n : {10'000LL, 100'000LL, 1'000'000LL, 10'000'000LL}) {
    const double k = mdicv::finite_size_key_rate(p, mdicv::make_local(n),
                                                 EstimationMode::local);
    CHECK(k > prev);
    prev = k;
  }
}

TEST_CASE("worst-case bounds collapse onto the true parameters") {
  const double eta = 0.3;
  const double eps = 0.002;
  // Infinite statistics: the confidence interval width vanishes.
  const auto wide = mdicv::worst_case_params(
      eta, eps, 10'000'000'000'000'000LL, 19.0, 6.5);
  CHECK_THAT(wide.t_min, WithinAbs(std::sqrt(eta), 1e-6));
  CHECK_THAT(wide.sigma2_max, WithinAbs(1.0 + eta * eps, 1e-6));
  // Zero confidence width: exactly the true parameters at any m.
  const auto zero = mdicv::worst_case_params(eta, eps, 100, 19.0, 0.0);
  CHECK(zero.t_min == std::sqrt(eta));
  CHECK(zero.sigma2_max == 1.0 + eta * eps);
  CHECK_FALSE(zero.t_clamped);
}

TEST_CASE("estimation-matrix and channel-model parametrizations diverge") {
  // The estimation-side matrix keeps the source variance V on its first
  // diagonal block, while the channel model attenuates both diagonal blocks.
  // Driving the confidence width to zero therefore does NOT recover the
  // channel-model state; the two rates differ by construction. The gap is
  // computed here for the record, with no equality (or magnitude) asserted.
  const ChannelParams p = defaults_at(10.0);
  const double eta = mdicv::transmittance_from_distance(
      p.total_distance_km / 2.0, p.attenuation_db_per_km);
  const auto wc = mdicv::worst_case_params(
      eta, p.excess_noise, 10'000'000'000'000'000LL, 19.0, 6.5);
  const double k_est = mdicv::asymptotic_key_rate(
      mdicv::worst_case_covariance(p.modulation_variance, wc), p.beta);
  const double k_chan =
      mdicv::asymptotic_key_rate(mdicv::build_covariance(p), p.beta);
  INFO("estimation-form rate " << k_est << ", channel-model rate " << k_chan);
  CHECK(std::isfinite(k_est));
  CHECK(std::isfinite(k_chan));
  CHECK(k_est != k_chan);
}

TEST_CASE("finite-size rate never exceeds the asymptotic rate") {
  for (double d : {0.0, 1.0, 3.0, 5.0, 7.0, 10.0}) {
    const ChannelParams p = defaults_at(d);
    const double k_asym =
        mdicv::asymptotic_key_rate(mdicv::build_covariance(p), p.beta);
    for (std::int64_t n : {10'000LL, 1'000'000LL, 100'000'000LL}) {
      const double local = mdicv::finite_size_key_rate(
          p, mdicv::make_local(n), EstimationMode::local);
      const double conv = mdicv::finite_size_key_rate(
          p, mdicv::make_conventional(n), EstimationMode::conventional);
      CHECK(local <= k_asym + 1e-12);
      CHECK(conv <= k_asym + 1e-12);
    }
  }
}
