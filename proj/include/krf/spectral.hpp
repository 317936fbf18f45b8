#pragma once

#include <cstdint>
#include <vector>

#include "krf/grid.hpp"

namespace krf {

// Fourier coefficients c_k with f(x) = sum_k c_k exp(2 pi i k.x), stored in
// the same flat layout as physical samples (FFT ordering per axis).
struct Spectrum {
  Grid grid;
  std::vector<cplx> coeffs;
};

Spectrum fourier(const ScalarField& field);
ScalarField synthesize(const Spectrum& spectrum);

// Holomorphic / anti-holomorphic derivatives along complex axis j (0-based):
//   dz_j = (d/dx^j - i d/dy^j) / 2,   dzbar_j = (d/dx^j + i d/dy^j) / 2.
// The Nyquist row of every axis is dropped, so conj(dz f) == dzbar(conj f)
// holds exactly and mixed derivatives commute.
ScalarField dz(const ScalarField& field, int j);
ScalarField dzbar(const ScalarField& field, int j);

// All n first derivatives from a single forward transform.
std::vector<ScalarField> dz_all(const ScalarField& field);
std::vector<ScalarField> dzbar_all(const ScalarField& field);
// Mixed Hessian dz_k dzbar_l f, entry [k * n + l].
std::vector<ScalarField> ddbar_all(const ScalarField& field);

// Mean over the unit-volume torus.
cplx integrate(const ScalarField& field);

// 2/3 rule: keep only modes with |k_a| <= N/3 on every axis.
ScalarField dealias(const ScalarField& field);
int dealias_cutoff(const Grid& grid);

// Real, mean-zero field with Fourier support in the max-norm ball of radius K,
// rescaled so that its grid max-norm equals `amplitude`.  Coefficients are a
// function of (seed, wavevector) only, so the same (K, seed) describes the
// same underlying function on every resolution.
ScalarField random_bandlimited(const Grid& grid, int K, double amplitude, std::uint64_t seed);

// Centered periodic finite difference along real axis `axis` (0..2n-1):
// order 1 gives d/dx, order 2 gives d^2/dx^2.  Second-order accurate.
ScalarField fd_oracle(const ScalarField& field, int axis, int order);

// splitmix64 step; advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace krf
