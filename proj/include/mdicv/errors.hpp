#pragma once

#include <stdexcept>
#include <string>

namespace mdicv {

// A covariance matrix violates the Heisenberg physicality bound (smallest
// symplectic eigenvalue below 1 beyond tolerance, or an impossible moment
// combination such as a non-positive conditional variance).
struct unphysical_covariance_error : std::domain_error {
  using std::domain_error::domain_error;
};

// The asymptotic rate is non-positive already at zero excess noise, so no
// tolerable-noise root exists.
struct no_positive_rate_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterative routine failed to converge or a bracket could not be
// established within its growth cap.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The gain optimizer found no usable correlation to optimize against.
struct degenerate_optimum_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Empirical moments contradict the declared displacement/measurement sign
// conventions beyond statistical tolerance (almost certainly a sign bug).
struct convention_violation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A requested modulation target lies outside the reachable amplitude range of
// the interferometer.
struct reachability_error : std::domain_error {
  using std::domain_error::domain_error;
};

}  // namespace mdicv
