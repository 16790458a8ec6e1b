#pragma once

// Deterministic random streams. Substream seeds come from the splitmix64
// sequence, so any (seed, stream index) pair names the same stream forever,
// independent of how work is scheduled. Gaussian deviates use the
// trigonometric Box-Muller transform rather than std::normal_distribution:
// the standard leaves that algorithm implementation-defined, which would make
// bit-exact output a property of the standard library du jour instead of a
// contract this code can keep.

#include <cmath>
#include <cstdint>
#include <random>

namespace mdicv {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// The stream_index-th output of the splitmix64 generator started at `seed`.
inline std::uint64_t stream_seed(std::uint64_t seed,
                                 std::uint64_t stream_index) {
  return splitmix64(seed + stream_index * 0x9e3779b97f4a7c15ULL);
}

class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  // Standard normal deviate.
  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  // Normal deviate with the given standard deviation.
  double next(double stddev) { return stddev * next(); }

 private:
  // Uniform on the open interval (0, 1); never 0, so log() stays finite.
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace mdicv
