#include "krf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "grid_data.hpp"

namespace krf {

namespace {

constexpr double kPi = std::numbers::pi;

void transform(fftw_plan plan, CVec& data) {
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

CVec forward_raw(const ScalarField& field) {
  CVec data(field.values().begin(), field.values().end());
  transform(field.grid().data().forward, data);
  return data;
}

ScalarField backward_scaled(const Grid& grid, CVec data) {
  transform(grid.data().backward, data);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& v : data) v *= scale;
  return ScalarField(grid, std::move(data));
}

// Wavenumber along `axis` with the Nyquist row mapped to zero.
inline int derivative_wavenumber(const detail::GridData& d, std::size_t p, int axis) {
  return d.derivative_k[axis * d.size + p];
}

inline cplx symbol_dz(const detail::GridData& d, std::size_t p, int j) {
  const double kx = derivative_wavenumber(d, p, 2 * j);
  const double ky = derivative_wavenumber(d, p, 2 * j + 1);
  return {kPi * ky, kPi * kx};
}

inline cplx symbol_dzbar(const detail::GridData& d, std::size_t p, int j) {
  const double kx = derivative_wavenumber(d, p, 2 * j);
  const double ky = derivative_wavenumber(d, p, 2 * j + 1);
  return {-kPi * ky, kPi * kx};
}

// Plain product; symbols and spectra are finite, so the C99 special-value
// handling of std::complex multiplication is not needed.
inline cplx multiply(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

template <typename Symbol>
ScalarField apply_symbol(const Grid& grid, const CVec& raw, Symbol symbol) {
  CVec out(raw.size());
  const auto& d = grid.data();
  for (std::size_t p = 0; p < raw.size(); ++p) out[p] = multiply(symbol(d, p), raw[p]);
  return backward_scaled(grid, std::move(out));
}

}  // namespace

Spectrum fourier(const ScalarField& field) {
  const CVec raw = forward_raw(field);
  Spectrum s{field.grid(), std::vector<cplx>(raw.begin(), raw.end())};
  const double scale = 1.0 / static_cast<double>(field.size());
  for (auto& c : s.coeffs) c *= scale;
  return s;
}

ScalarField synthesize(const Spectrum& spectrum) {
  CVec data(spectrum.coeffs.begin(), spectrum.coeffs.end());
  transform(spectrum.grid.data().backward, data);
  return ScalarField(spectrum.grid, std::move(data));
}

ScalarField dz(const ScalarField& field, int j) {
  return apply_symbol(field.grid(), forward_raw(field),
                      [j](const detail::GridData& d, std::size_t p) { return symbol_dz(d, p, j); });
}

ScalarField dzbar(const ScalarField& field, int j) {
  return apply_symbol(field.grid(), forward_raw(field),
                      [j](const detail::GridData& d, std::size_t p) { return symbol_dzbar(d, p, j); });
}

std::vector<ScalarField> dz_all(const ScalarField& field) {
  const auto raw = forward_raw(field);
  std::vector<ScalarField> out;
  for (int j = 0; j < field.grid().dim(); ++j) {
    out.push_back(apply_symbol(field.grid(), raw,
                               [j](const detail::GridData& d, std::size_t p) { return symbol_dz(d, p, j); }));
  }
  return out;
}

std::vector<ScalarField> dzbar_all(const ScalarField& field) {
  const auto raw = forward_raw(field);
  std::vector<ScalarField> out;
  for (int j = 0; j < field.grid().dim(); ++j) {
    out.push_back(apply_symbol(field.grid(), raw, [j](const detail::GridData& d, std::size_t p) {
      return symbol_dzbar(d, p, j);
    }));
  }
  return out;
}

std::vector<ScalarField> ddbar_all(const ScalarField& field) {
  const auto raw = forward_raw(field);
  const int n = field.grid().dim();
  std::vector<ScalarField> out;
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      out.push_back(apply_symbol(field.grid(), raw, [k, l](const detail::GridData& d, std::size_t p) {
        return multiply(symbol_dz(d, p, k), symbol_dzbar(d, p, l));
      }));
    }
  }
  return out;
}

cplx integrate(const ScalarField& field) {
  cplx sum = 0.0;
  for (const auto& v : field.values()) sum += v;
  return sum / static_cast<double>(field.size());
}

int dealias_cutoff(const Grid& grid) { return grid.resolution() / 3; }

ScalarField dealias(const ScalarField& field) {
  auto raw = forward_raw(field);
  const auto& d = field.grid().data();
  for (std::size_t p = 0; p < raw.size(); ++p) {
    if (!d.dealias_keep[p]) raw[p] = 0.0;
  }
  return backward_scaled(field.grid(), std::move(raw));
}

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ScalarField random_bandlimited(const Grid& grid, int K, double amplitude, std::uint64_t seed) {
  if (K < 1 || K > grid.resolution() / 3) {
    throw std::invalid_argument("band limit K must satisfy 1 <= K <= N/3");
  }
  if (!(amplitude > 0.0)) throw std::invalid_argument("amplitude must be positive");

  const auto& d = grid.data();
  const int axes = grid.axes();
  std::vector<cplx> coeffs(grid.size(), 0.0);
  std::vector<int> k(axes);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    bool inside = true;
    for (int a = 0; a < axes; ++a) {
      k[a] = d.wavenumbers[grid.index(p, a)];
      if (std::abs(k[a]) > K) inside = false;
    }
    if (!inside) continue;
    // Canonical representative of the pair {k, -k}: first nonzero entry > 0.
    int sign = 0;
    for (int a = 0; a < axes && sign == 0; ++a) sign = (k[a] > 0) - (k[a] < 0);
    if (sign == 0) continue;  // zero mode: mean-zero potentials
    std::uint64_t key = 0;
    for (int a = 0; a < axes; ++a) key = key * 1024 + static_cast<std::uint64_t>(sign * k[a] + 512);
    std::uint64_t state = seed ^ (key * 0xD1B54A32D192ED03ULL);
    const double re = 2.0 * (static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53) - 1.0;
    const double im = 2.0 * (static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53) - 1.0;
    coeffs[p] = sign > 0 ? cplx(re, im) : cplx(re, -im);
  }
  ScalarField field = synthesize(Spectrum{grid, std::move(coeffs)});
  if (field.max_imag() > 1e-10 * std::max(1.0, field.max_abs())) {
    throw std::logic_error("band-limited generator lost Hermitian symmetry");
  }
  field = field.real_part();
  const double scale = amplitude / field.max_abs();
  field *= scale;
  return field;
}

ScalarField fd_oracle(const ScalarField& field, int axis, int order) {
  const Grid& grid = field.grid();
  if (axis < 0 || axis >= grid.axes()) throw std::invalid_argument("axis out of range");
  if (order != 1 && order != 2) throw std::invalid_argument("order must be 1 or 2");
  const double h = grid.spacing();
  ScalarField out(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const cplx fp = field[grid.shifted(p, axis, 1)];
    const cplx fm = field[grid.shifted(p, axis, -1)];
    out[p] = order == 1 ? (fp - fm) / (2.0 * h) : (fp - 2.0 * field[p] + fm) / (h * h);
  }
  return out;
}

}  // namespace krf
