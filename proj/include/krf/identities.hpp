#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "krf/geometry.hpp"

namespace krf {

// Frozen-time two-path identities on seeded random admissible states.
struct IdentityCheck {
  std::string identity;
  std::uint64_t seed = 0;
  double residual = 0.0;
  double scale = 0.0;
  double tolerance = 1e-8;  // relative to 1 + scale
  bool pass = false;
};

struct IdentitySuiteReport {
  int n = 1;
  int N = 64;
  int seeds = 0;
  int conversion_order = 0;  // highest k of the nabla^k Rm conversion checked
  std::vector<IdentityCheck> checks;
  bool pass = false;
};

// Potential with band limit K rescaled so that max |dz dzbar phi| = delta.
ScalarField potential_with_hessian(const Grid& grid, int K, double delta, std::uint64_t seed);

// Random admissible pair (reference, metric) for one seed.
struct IdentityState {
  Reference ref;
  MetricField g;
};
IdentityState identity_state(const Grid& grid, std::uint64_t seed);

std::vector<IdentityCheck> check_state(const IdentityState& state, int conversion_order, std::uint64_t seed);

// Throws std::invalid_argument for seeds < 1 and GridError for bad sizes.
// conversion_order < 0 picks 2 at n = 1 and 1 at n = 2.
IdentitySuiteReport check_identities(int seeds, int n, int N, int conversion_order = -1);

}  // namespace krf
