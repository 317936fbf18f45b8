#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <new>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace krf {

using cplx = std::complex<double>;

// Cache-line aligned storage, so FFT plans can assume SIMD alignment.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t alignment{64};
  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) {}
  T* allocate(std::size_t count) { return static_cast<T*>(::operator new(count * sizeof(T), alignment)); }
  void deallocate(T* ptr, std::size_t) { ::operator delete(ptr, alignment); }
  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const { return true; }
};

using CVec = std::vector<cplx, AlignedAllocator<cplx>>;

class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {
struct GridData;
}

// Uniform periodic grid on the torus C^n / (Z + iZ)^n.
//
// Real axes are ordered (x^1, y^1, ..., x^n, y^n); samples are stored
// row-major over that order, so x^1 varies slowest.  Every axis has period 1
// and N samples at m/N.
class Grid {
 public:
  Grid() = default;
  // Throws GridError unless n in {1,2} and N is a power of two in [16, 256].
  static Grid make(int n, int N);

  int dim() const;         // complex dimension n
  int resolution() const;  // N
  int axes() const { return 2 * dim(); }
  std::size_t size() const;  // N^(2n)

  double spacing() const { return 1.0 / resolution(); }
  // Coordinate of `point` along real axis `axis`.
  double coordinate(std::size_t point, int axis) const;
  // Integer index of `point` along `axis`.
  int index(std::size_t point, int axis) const;
  // Flat index of the neighbour `shift` samples away along `axis`.
  std::size_t shifted(std::size_t point, int axis, int shift) const;

  // Fourier ordering: 0, 1, ..., N/2-1, -N/2, ..., -1.
  std::span<const int> wavenumbers() const;

  bool operator==(const Grid& other) const;
  bool valid() const { return data_ != nullptr; }

  const detail::GridData& data() const { return *data_; }

 private:
  explicit Grid(std::shared_ptr<const detail::GridData> data) : data_(std::move(data)) {}
  std::shared_ptr<const detail::GridData> data_;
};

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& grid, cplx fill = 0.0);
  ScalarField(const Grid& grid, std::span<const cplx> values);
  ScalarField(const Grid& grid, CVec values);

  static ScalarField from_function(const Grid& grid,
                                   const std::function<cplx(std::span<const double>)>& fn);

  const Grid& grid() const { return grid_; }
  bool valid() const { return grid_.valid(); }
  std::size_t size() const { return values_.size(); }

  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }
  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(const ScalarField& other);
  ScalarField& operator*=(cplx s);
  // this += s * other
  ScalarField& axpy(cplx s, const ScalarField& other);

  ScalarField conj() const;
  ScalarField real_part() const;

  double max_abs() const;
  double max_imag() const;
  double max_real() const;
  double min_real() const;
  std::size_t argmax_real() const;
  bool all_finite() const;

 private:
  Grid grid_;
  CVec values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, const ScalarField& b);
ScalarField operator*(cplx s, ScalarField a);

// Runs fn(begin, end) over [0, count) in contiguous chunks.  The worker count
// is capped by the KRF_THREADS environment variable.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& fn);
int thread_cap();

}  // namespace krf
