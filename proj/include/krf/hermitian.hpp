#pragma once

#include <array>
#include <complex>

namespace krf {

// Small dense Hermitian algebra for the per-point n x n problems (n <= 2).
struct Mat {
  int n = 1;
  std::array<std::complex<double>, 4> a{};  // row-major, a[i * n + j]

  std::complex<double>& operator()(int i, int j) { return a[i * n + j]; }
  std::complex<double> operator()(int i, int j) const { return a[i * n + j]; }
};

Mat identity(int n);
Mat multiply(const Mat& x, const Mat& y);
Mat adjoint(const Mat& x);
Mat inverse(const Mat& x);
std::complex<double> determinant(const Mat& x);

struct HermitianEigen {
  std::array<double, 2> values{};  // ascending
  Mat vectors;                     // unitary, column k is the k-th eigenvector
};

// Closed-form eigen-decomposition of a Hermitian matrix (Hermitian part used).
HermitianEigen hermitian_eigen(const Mat& h);

// Generalized problem G v = lambda G0 v for Hermitian G and positive G0,
// solved by Cholesky reduction of G0.  `frame` satisfies
// frame^H G0 frame = I and frame^H G frame = diag(values).
struct GeneralizedEigen {
  std::array<double, 2> values{};
  Mat frame;
};
GeneralizedEigen generalized_eigen(const Mat& g, const Mat& g0);

}  // namespace krf
