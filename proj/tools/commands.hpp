#pragma once

// Stream-level implementations of the CLI subcommands. Each function takes
// a plain options struct and writes to caller-supplied streams, so the same
// code paths are exercised by the test suite (against string streams) and
// by main() (against files and the console). Functions return the process
// exit status for "completed, possibly with a failed self-check" outcomes;
// hard errors propagate as exceptions and are mapped by the caller.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mdicv::cli {

inline constexpr const char* kVersion = "1.0.0";

// Exit statuses shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumeric = 2;
inline constexpr int kExitSelfCheck = 3;

struct OutputOptions {
  bool timestamp = true;  // --no-timestamp clears this for reproducible files
};

// Inclusive distance grid d = dmin, dmin + dstep, ... while d <= dmax.
// dmin == dmax yields the single-point grid regardless of dstep.
std::vector<double> distance_grid(double dmin_km, double dmax_km,
                                  double dstep_km);

// Plain key=value configuration text: '#' comments and blank lines are
// skipped, keys and values are trimmed. Malformed lines (no '=') and empty
// keys are rejected with std::invalid_argument.
std::vector<std::pair<std::string, std::string>> parse_config_text(
    std::istream& in);

struct AsymptoticSweepOptions {
  double variance = 20.0;       // --v
  double beta = 0.95;           // --beta
  double excess_noise = 0.001;  // --eps
  double attenuation = 0.2;     // --alpha-db-km
  double dmin_km = 0.0;
  double dmax_km = 60.0;
  double dstep_km = 0.5;
};

int run_asymptotic_sweep(const AsymptoticSweepOptions& opt,
                         const OutputOptions& io, std::ostream& csv,
                         std::ostream& text);

struct TolerableNoiseOptions {
  double variance = 20.0;
  double beta = 0.95;
  double attenuation = 0.2;
  double dmin_km = 0.0;
  double dmax_km = 60.0;
  double dstep_km = 0.5;
  bool emit_residuals = false;
};

int run_tolerable_noise(const TolerableNoiseOptions& opt,
                        const OutputOptions& io, std::ostream& csv,
                        std::ostream& text, std::ostream& warnings);

struct FiniteSizeSweepOptions {
  double variance = 20.0;
  double beta = 0.95;
  double excess_noise = 0.001;
  double attenuation = 0.2;
  double dmin_km = 0.0;
  double dmax_km = 60.0;
  double dstep_km = 0.5;
  std::vector<std::int64_t> block_sizes = {10'000, 100'000, 1'000'000,
                                           10'000'000, 100'000'000};
  bool self_check = false;
};

int run_finite_size_sweep(const FiniteSizeSweepOptions& opt,
                          const OutputOptions& io, std::ostream& csv,
                          std::ostream& text);

struct SimulateOptions {
  double variance = 20.0;
  double beta = 0.95;
  double excess_noise = 0.001;
  double attenuation = 0.2;
  double distance_km = 10.0;
  std::optional<double> gain;  // empty: search for the optimum
  std::int64_t pulses = 100'000;
  std::uint64_t seed = 0;
  int threads = 1;
};

// records may be null when per-pulse output was not requested.
int run_simulate(const SimulateOptions& opt, const OutputOptions& io,
                 std::ostream& summary_csv, std::ostream* records,
                 std::ostream& text);

struct DpmVerifyOptions {
  std::int64_t trials = 1000;
  std::int64_t samples = 1'000'000;
  double modulation_variance = 4.0;
  std::uint64_t seed = 0;
  bool inject_error = false;  // tilt the mirror to prove the check can fail
};

int run_dpm_verify(const DpmVerifyOptions& opt, const OutputOptions& io,
                   std::ostream& csv, std::ostream& text);

}  // namespace mdicv::cli
