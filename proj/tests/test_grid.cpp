#include <doctest.h>

#include <cmath>
#include <sstream>

#include "krf/field_io.hpp"
#include "krf/spectral.hpp"
#include "test_support.hpp"

using namespace krf;
using krf::test::cosine;
using krf::test::max_diff;
using krf::test::pi;

TEST_CASE("grid construction") {
  const Grid g = Grid::make(1, 16);
  CHECK(g.size() == 256);
  CHECK(g.coordinate(0, 0) == 0.0);
  CHECK(g.coordinate(g.size() - 1, 0) == doctest::Approx(15.0 / 16));
  CHECK(g.coordinate(g.size() - 1, 1) == doctest::Approx(15.0 / 16));
  CHECK(Grid::make(2, 32).size() == 32u * 32 * 32 * 32);

  CHECK_THROWS_WITH_AS(Grid::make(1, 20), "resolution must be power of two", GridError);
  CHECK_THROWS_AS(Grid::make(3, 16), GridError);
  CHECK_THROWS_AS(Grid::make(1, 8), GridError);
  CHECK_THROWS_AS(Grid::make(1, 512), GridError);
}

TEST_CASE("wavenumber table") {
  const Grid g = Grid::make(1, 16);
  const auto k = g.wavenumbers();
  REQUIRE(k.size() == 16);
  CHECK(k[0] == 0);
  CHECK(k[7] == 7);
  CHECK(k[8] == -8);
  CHECK(k[15] == -1);
  // negation maps the table onto itself except for the Nyquist row
  for (int i = 1; i < 16; ++i) {
    if (i == 8) continue;
    CHECK(k[16 - i] == -k[i]);
  }
}

TEST_CASE("holomorphic derivatives of a cosine") {
  const Grid g = Grid::make(1, 32);
  const ScalarField u = cosine(g, 0);
  const ScalarField expect =
      ScalarField::from_function(g, [](auto x) { return -pi * std::sin(2 * pi * x[0]); });
  CHECK(max_diff(dz(u, 0), expect) < 1e-12);
  CHECK(max_diff(dzbar(u, 0), expect) < 1e-12);
  CHECK(max_diff(dz(dzbar(u, 0), 0), cosine(g, 0, -pi * pi)) < 1e-11);
  CHECK(dz(ScalarField(g, 2.5), 0).max_abs() < 1e-14);

  // y-dependence enters with the imaginary unit
  const ScalarField v = cosine(g, 1);
  const ScalarField dv =
      ScalarField::from_function(g, [](auto x) { return cplx(0, pi) * std::sin(2 * pi * x[1]); });
  CHECK(max_diff(dz(v, 0), dv) < 1e-12);
  CHECK(max_diff(dzbar(v, 0), -1.0 * dv) < 1e-12);
}

TEST_CASE("integration") {
  const Grid g = Grid::make(1, 16);
  CHECK(std::abs(integrate(ScalarField(g, 3.0)) - 3.0) < 1e-14);
  CHECK(std::abs(integrate(cosine(g, 0))) < 1e-14);
  const auto f = ScalarField::from_function(g, [](auto x) { return 2.0 + std::sin(2 * pi * x[1]); });
  CHECK(std::abs(integrate(f) - 2.0) < 1e-14);
}

TEST_CASE("random band-limited fields") {
  const Grid g = Grid::make(1, 32);
  const ScalarField a = random_bandlimited(g, 2, 0.1, 7);
  const ScalarField b = random_bandlimited(g, 2, 0.1, 7);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  CHECK(a.max_abs() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(a.max_imag() < 1e-12);
  CHECK(std::abs(integrate(a)) < 1e-14);
  CHECK(max_diff(a, random_bandlimited(g, 2, 0.1, 8)) > 1e-3);

  const Spectrum s = fourier(a);
  const auto k = g.wavenumbers();
  for (std::size_t p = 0; p < g.size(); ++p) {
    const int kx = k[g.index(p, 0)], ky = k[g.index(p, 1)];
    if (std::max(std::abs(kx), std::abs(ky)) > 2) CHECK(std::abs(s.coeffs[p]) < 1e-15);
  }

  CHECK_THROWS_WITH(random_bandlimited(g, 2, 0.0, 7), "amplitude must be positive");
  CHECK_THROWS(random_bandlimited(g, 11, 0.1, 7));
  CHECK_NOTHROW(random_bandlimited(g, 10, 0.1, 7));
}

TEST_CASE("band-limited fields describe one function on every resolution") {
  const ScalarField coarse = random_bandlimited(Grid::make(1, 32), 5, 0.1, 3);
  const ScalarField fine = random_bandlimited(Grid::make(1, 64), 5, 0.1, 3);
  // every coarse sample is also a fine sample; the amplitudes may differ only
  // by the grid max, which is checked on the shared points
  double ratio = 0.0;
  const Grid& gc = coarse.grid();
  const Grid& gf = fine.grid();
  std::size_t pf0 = 0;
  for (std::size_t p = 0; p < gc.size(); ++p) {
    const std::size_t pf = static_cast<std::size_t>(gc.index(p, 0)) * 2 * 64 + gc.index(p, 1) * 2;
    if (std::abs(coarse[p]) > 0.05) {
      ratio = fine[pf].real() / coarse[p].real();
      pf0 = pf;
      break;
    }
  }
  REQUIRE(ratio > 0.0);
  (void)pf0;
  for (std::size_t p = 0; p < gc.size(); ++p) {
    const std::size_t pf = static_cast<std::size_t>(gc.index(p, 0)) * 2 * 64 + gc.index(p, 1) * 2;
    CHECK(std::abs(fine[pf] - ratio * coarse[p]) < 1e-13);
  }
  (void)gf;
}

TEST_CASE("Parseval") {
  const Grid g = Grid::make(1, 32);
  const ScalarField f = random_bandlimited(g, 6, 1.0, 11) + cosine(g, 1, 0.3, 16);
  const Spectrum s = fourier(f);
  double spectral = 0.0;
  for (const auto& c : s.coeffs) spectral += std::norm(c);
  ScalarField sq(g);
  for (std::size_t p = 0; p < g.size(); ++p) sq[p] = std::norm(f[p]);
  CHECK(integrate(sq).real() == doctest::Approx(spectral).epsilon(1e-12));
  CHECK(max_diff(synthesize(s), f) < 1e-13);
}

TEST_CASE("mixed derivatives commute and respect conjugation") {
  for (int n : {1, 2}) {
    const Grid g = Grid::make(n, n == 1 ? 64 : 16);
    const ScalarField u = random_bandlimited(g, n == 1 ? 8 : 4, 0.5, 5);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double scale = 1.0 + dz(dzbar(u, j), k).max_abs();
        CHECK(max_diff(dz(dzbar(u, j), k), dzbar(dz(u, k), j)) <= 1e-10 * scale);
      }
    ScalarField w = u;
    w *= cplx(0.3, 1.7);
    w += cosine(g, 2 * n - 1, 1.0, 7);
    for (int j = 0; j < n; ++j) CHECK(max_diff(dzbar(w.conj(), j), dz(w, j).conj()) < 1e-12);
    const auto hess = ddbar_all(u);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) CHECK(max_diff(hess[k * n + l], dz(dzbar(u, l), k)) < 1e-10);
  }
}

TEST_CASE("finite-difference oracle") {
  const Grid g = Grid::make(1, 16);
  CHECK(fd_oracle(ScalarField(g, 4.0), 0, 1).max_abs() == 0.0);
  CHECK(fd_oracle(ScalarField(g, 4.0), 1, 2).max_abs() == 0.0);
  CHECK(fd_oracle(cosine(g, 1), 0, 1).max_abs() == 0.0);

  auto error = [](int N, int order) {
    const Grid grid = Grid::make(1, N);
    const auto f = ScalarField::from_function(grid, [](auto x) { return std::exp(std::sin(2 * pi * x[0])); });
    // spectral d/dx = dz + dzbar
    ScalarField exact = dz(f, 0) + dzbar(f, 0);
    if (order == 2) {
      ScalarField first = exact;
      exact = dz(first, 0) + dzbar(first, 0);
    }
    return max_diff(fd_oracle(f, 0, order), exact) / exact.max_abs();
  };
  for (int order : {1, 2}) {
    const double e64 = error(64, order), e128 = error(128, order);
    CHECK(std::log2(e64 / e128) >= 1.9);
    CHECK(e128 < 2e-3);
  }
  // cosine at N=128 against the analytic derivative
  const Grid g128 = Grid::make(1, 128);
  const auto exact =
      ScalarField::from_function(g128, [](auto x) { return -2 * pi * std::sin(2 * pi * x[0]); });
  CHECK(max_diff(fd_oracle(cosine(g128, 0), 0, 1), exact) <= 2 * pi * std::pow(2 * pi / 128, 2) / 6 * 1.01);
}

TEST_CASE("field dump round trip") {
  const Grid g = Grid::make(2, 16);
  ScalarField f = random_bandlimited(g, 3, 0.2, 9);
  f += ScalarField(g, cplx(0, 0.25));
  std::stringstream complex_dump;
  write_field(complex_dump, f, FieldKind::complex);
  const std::string bytes = complex_dump.str();
  CHECK(bytes.rfind("KRFLAB-FIELD v1 n=2 N=16 kind=complex\n", 0) == 0);
  const ScalarField back = read_field(complex_dump);
  CHECK(back.grid() == g);
  CHECK(std::equal(f.values().begin(), f.values().end(), back.values().begin()));

  std::stringstream real_dump;
  write_field(real_dump, f, FieldKind::real);
  const ScalarField re = read_field(real_dump);
  CHECK(max_diff(re, f.real_part()) == 0.0);

  std::stringstream truncated(bytes.substr(0, bytes.size() - 8));
  CHECK_THROWS_AS(read_field(truncated), FormatError);
  std::stringstream bad("KRFLAB-FIELD v2 n=1 N=16 kind=real\n");
  CHECK_THROWS_AS(read_field(bad), FormatError);
}
