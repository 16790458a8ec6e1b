#pragma once

// Pulse-level Monte-Carlo of the two-arm relay protocol.
//
// Each pulse: both parties draw centred Gaussian key data for their two
// quadratures, imprint it on coherent states (one vacuum unit rides along),
// and send the states through independent lossy arms with excess noise to a
// central node. The node measures x_z = (x_1 - x_2)/sqrt(2) and
// p_z = (p_1 + p_2)/sqrt(2) and publishes the result; the parties displace
// their data by a tunable gain times the announcement to build correlated
// key strings.
//
// Sampling is chunked: every chunk of kSimChunk pulses gets its own counter
// derived generator, so batches are bit-for-bit reproducible for a given
// seed no matter how many worker threads fill them.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include <mdicv/errors.hpp>
#include <mdicv/gaussian_info.hpp>
#include <mdicv/moments.hpp>
#include <mdicv/rng.hpp>

namespace mdicv {

inline constexpr std::int64_t kSimChunk = 65536;

struct SimConfig {
  double source_variance_a = 20.0;  // total per-quadrature variance (vacuum included)
  double source_variance_b = 20.0;
  double t1 = 1.0;                  // arm transmittances
  double t2 = 1.0;
  double excess_noise = 0.0;        // referred to the channel input
  std::optional<double> gain;       // empty: search for the optimum after the batch
  std::int64_t num_pulses = 0;
  std::uint64_t seed = 0;
};

inline void validate(const SimConfig& c) {
  if (!(c.source_variance_a >= 1.0) || !(c.source_variance_b >= 1.0))
    throw std::invalid_argument("SimConfig: source variance below vacuum");
  if (!(c.t1 > 0.0) || c.t1 > 1.0 || !(c.t2 > 0.0) || c.t2 > 1.0)
    throw std::invalid_argument("SimConfig: transmittance outside (0, 1]");
  if (!(c.excess_noise >= 0.0))
    throw std::invalid_argument("SimConfig: negative excess noise");
  if (c.gain && !std::isfinite(*c.gain))
    throw std::invalid_argument("SimConfig: non-finite gain");
  if (c.num_pulses < 1)
    throw std::invalid_argument("SimConfig: num_pulses < 1");
}

// Analytic predictions for the same parameters (key data variance is the
// source variance minus the vacuum unit).
inline MomentAlgebra moment_model(const SimConfig& c) {
  return MomentAlgebra::from_parameters(c.source_variance_a - 1.0,
                                        c.source_variance_b - 1.0, c.t1, c.t2,
                                        c.excess_noise);
}

struct RoundRecord {
  double xa_mod = 0.0, pa_mod = 0.0;  // party A key data
  double xb_mod = 0.0, pb_mod = 0.0;  // party B key data
  double xz = 0.0, pz = 0.0;          // node announcement
  double xa = 0.0, pa = 0.0;          // displaced keys (displace_keys fills)
  double xb = 0.0, pb = 0.0;
};

namespace detail {

inline void fill_chunk(const SimConfig& cfg, std::int64_t chunk_index,
                       RoundRecord* out, std::int64_t count) {
  GaussianStream g(stream_seed(cfg.seed, static_cast<std::uint64_t>(chunk_index)));
  const double sig_a = std::sqrt(cfg.source_variance_a - 1.0);
  const double sig_b = std::sqrt(cfg.source_variance_b - 1.0);
  const double amp1 = std::sqrt(cfg.t1);
  const double amp2 = std::sqrt(cfg.t2);
  const double noise1 = std::sqrt((1.0 - cfg.t1) + cfg.t1 * cfg.excess_noise);
  const double noise2 = std::sqrt((1.0 - cfg.t2) + cfg.t2 * cfg.excess_noise);
  const double half_power = std::sqrt(0.5);
  for (std::int64_t i = 0; i < count; ++i) {
    RoundRecord r{};
    // Fixed draw order, 12 normals per pulse; draws are consumed even when
    // their coefficient is zero so the stream layout never depends on the
    // physical parameters.
    r.xa_mod = g.next(sig_a);
    r.pa_mod = g.next(sig_a);
    r.xb_mod = g.next(sig_b);
    r.pb_mod = g.next(sig_b);
    const double xa3 = amp1 * (r.xa_mod + g.next()) + noise1 * g.next();
    const double pa3 = amp1 * (r.pa_mod + g.next()) + noise1 * g.next();
    const double xb3 = amp2 * (r.xb_mod + g.next()) + noise2 * g.next();
    const double pb3 = amp2 * (r.pb_mod + g.next()) + noise2 * g.next();
    r.xz = (xa3 - xb3) * half_power;
    r.pz = (pa3 + pb3) * half_power;
    out[i] = r;
  }
}

}  // namespace detail

inline std::vector<RoundRecord> simulate_batch(const SimConfig& cfg,
                                               int threads = 1) {
  validate(cfg);
  if (threads < 1) throw std::invalid_argument("simulate_batch: threads < 1");
  const std::int64_t n = cfg.num_pulses;
  std::vector<RoundRecord> records(static_cast<std::size_t>(n));
  const std::int64_t chunks = (n + kSimChunk - 1) / kSimChunk;
  const auto run_range = [&cfg, &records, n](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t c = lo; c < hi; ++c) {
      const std::int64_t begin = c * kSimChunk;
      detail::fill_chunk(cfg, c, records.data() + begin,
                         std::min<std::int64_t>(kSimChunk, n - begin));
    }
  };
  const int workers =
      static_cast<int>(std::min<std::int64_t>(threads, chunks));
  if (workers <= 1) {
    run_range(0, chunks);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const std::int64_t per = (chunks + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::int64_t lo = w * per;
      const std::int64_t hi = std::min<std::int64_t>(chunks, lo + per);
      if (lo >= hi) break;
      pool.emplace_back(run_range, lo, hi);
    }
    for (auto& t : pool) t.join();
  }
  return records;
}

// Sample covariance (mean subtracted, n - 1 normalization) of
// (xa_mod, pa_mod, xb_mod, pb_mod, xz, pz).
inline Matrix6 estimate_tripartite_covariance(
    const std::vector<RoundRecord>& records) {
  const std::int64_t n = static_cast<std::int64_t>(records.size());
  if (n < 2)
    throw std::invalid_argument("estimate_tripartite_covariance: need >= 2 records");
  const auto view = [](const RoundRecord& r) {
    return std::array<double, 6>{r.xa_mod, r.pa_mod, r.xb_mod,
                                 r.pb_mod, r.xz,    r.pz};
  };
  std::array<double, 6> mean{};
  for (const auto& r : records) {
    const auto v = view(r);
    for (int i = 0; i < 6; ++i) mean[i] += v[i];
  }
  for (auto& m : mean) m /= static_cast<double>(n);
  Matrix6 cov{};
  for (const auto& r : records) {
    const auto v = view(r);
    for (int i = 0; i < 6; ++i)
      for (int j = i; j < 6; ++j)
        cov[i][j] += (v[i] - mean[i]) * (v[j] - mean[j]);
  }
  for (int i = 0; i < 6; ++i)
    for (int j = i; j < 6; ++j) {
      cov[i][j] /= static_cast<double>(n - 1);
      cov[j][i] = cov[i][j];
    }
  return cov;
}

// Turn the announcement into key correlations. The sign pattern pairs with
// the node convention above: it reinforces x-x correlations and leaves p-p
// anti-correlated with the same magnitude.
inline void displace_keys(std::vector<RoundRecord>& records, double gain) {
  if (!std::isfinite(gain))
    throw std::invalid_argument("displace_keys: non-finite gain");
  for (auto& r : records) {
    r.xa = r.xa_mod - gain * r.xz;
    r.pa = r.pa_mod - gain * r.pz;
    r.xb = r.xb_mod + gain * r.xz;
    r.pb = r.pb_mod - gain * r.pz;
  }
}

// Gain search over a batch. The second moments are accumulated once; the
// displaced-string covariance at any gain is then an exact quadratic in the
// gain (displacement is linear, sample covariance bilinear), identical to
// displacing the records and re-estimating.
class GainOptimizer {
 public:
  explicit GainOptimizer(const std::vector<RoundRecord>& records)
      : count_(static_cast<std::int64_t>(records.size())) {
    if (count_ < 1000)
      throw std::invalid_argument("GainOptimizer: need >= 1000 records");
    s_ = estimate_tripartite_covariance(records);
  }

  TwoModeCovariance displaced_pair(double k) const {
    const double var_xa = s_[0][0] - 2.0 * k * s_[0][4] + k * k * s_[4][4];
    const double var_pa = s_[1][1] - 2.0 * k * s_[1][5] + k * k * s_[5][5];
    const double var_xb = s_[2][2] + 2.0 * k * s_[2][4] + k * k * s_[4][4];
    const double var_pb = s_[3][3] - 2.0 * k * s_[3][5] + k * k * s_[5][5];
    const double cx = s_[0][2] + k * s_[0][4] - k * s_[2][4] - k * k * s_[4][4];
    const double cp = s_[1][3] - k * s_[1][5] - k * s_[3][5] + k * k * s_[5][5];
    return {0.5 * (var_xa + var_pa), 0.5 * (var_xb + var_pb),
            0.5 * (cx - cp)};
  }

  // Sign-gated objective: the negative covariance itself until the strings
  // become positively correlated, their mutual information after.
  double objective(double k) const {
    const TwoModeCovariance pair = displaced_pair(k);
    if (pair.c < 0.0) return pair.c;
    return mutual_information(pair);
  }

  double optimize() const {
    if (!(s_[4][4] + s_[5][5] > 0.0))
      throw degenerate_optimum_error("GainOptimizer: announcement has zero variance");
    const double k = detail::golden_section_max(
        [this](double x) { return objective(x); }, 0.0, 4.0, 1e-6);
    if (!(displaced_pair(k).c > 0.0))
      throw degenerate_optimum_error(
          "GainOptimizer: no positively correlated optimum");
    return k;
  }

 private:
  std::int64_t count_ = 0;
  Matrix6 s_{};
};

inline double optimize_gain(const std::vector<RoundRecord>& records) {
  return GainOptimizer(records).optimize();
}

// Symmetrized two-string covariance of the displaced keys, with its
// convention diagnostics: the x-x and p-p covariances must be equal and
// opposite up to sampling noise.
struct EffectivePair {
  TwoModeCovariance cov;
  double xx_covariance = 0.0;
  double pp_covariance = 0.0;
  double convention_residual = 0.0;     // xx + pp
  double convention_tolerance = 0.0;    // 10 joint standard errors
};

inline EffectivePair effective_two_mode_covariance(
    const std::vector<RoundRecord>& records) {
  const std::int64_t n = static_cast<std::int64_t>(records.size());
  if (n < 2)
    throw std::invalid_argument("effective_two_mode_covariance: need >= 2 records");
  std::array<double, 4> mean{};
  for (const auto& r : records) {
    mean[0] += r.xa;
    mean[1] += r.pa;
    mean[2] += r.xb;
    mean[3] += r.pb;
  }
  for (auto& m : mean) m /= static_cast<double>(n);
  double vxa = 0.0, vpa = 0.0, vxb = 0.0, vpb = 0.0, cx = 0.0, cp = 0.0;
  for (const auto& r : records) {
    const double dxa = r.xa - mean[0];
    const double dpa = r.pa - mean[1];
    const double dxb = r.xb - mean[2];
    const double dpb = r.pb - mean[3];
    vxa += dxa * dxa;
    vpa += dpa * dpa;
    vxb += dxb * dxb;
    vpb += dpb * dpb;
    cx += dxa * dxb;
    cp += dpa * dpb;
  }
  const double norm = static_cast<double>(n - 1);
  vxa /= norm;
  vpa /= norm;
  vxb /= norm;
  vpb /= norm;
  cx /= norm;
  cp /= norm;

  EffectivePair out;
  out.cov = {0.5 * (vxa + vpa), 0.5 * (vxb + vpb), 0.5 * (cx - cp)};
  out.xx_covariance = cx;
  out.pp_covariance = cp;
  out.convention_residual = cx + cp;
  const double se_x = covariance_standard_error(vxa, vxb, cx, n);
  const double se_p = covariance_standard_error(vpa, vpb, cp, n);
  out.convention_tolerance = 10.0 * std::hypot(se_x, se_p) + 1e-12;
  if (std::abs(out.convention_residual) > out.convention_tolerance)
    throw convention_violation_error(
        "effective_two_mode_covariance: x-x and p-p covariances are not "
        "equal and opposite within sampling tolerance");
  return out;
}

// One-call pipeline: simulate, pick (or take) the gain, displace.
struct SimResult {
  std::vector<RoundRecord> records;
  double gain = 0.0;
  bool gain_was_optimized = false;
};

inline SimResult run_protocol(const SimConfig& cfg, int threads = 1) {
  SimResult result;
  result.records = simulate_batch(cfg, threads);
  if (cfg.gain) {
    result.gain = *cfg.gain;
    result.gain_was_optimized = false;
  } else {
    result.gain = optimize_gain(result.records);
    result.gain_was_optimized = true;
  }
  displace_keys(result.records, result.gain);
  return result;
}

}  // namespace mdicv
