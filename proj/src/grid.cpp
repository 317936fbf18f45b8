#include "krf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "grid_data.hpp"

namespace krf {

namespace detail {

GridData::~GridData() {
  std::lock_guard lock(fftw_planner_mutex());
  if (forward) fftw_destroy_plan(forward);
  if (backward) fftw_destroy_plan(backward);
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

Grid Grid::make(int n, int N) {
  if (n != 1 && n != 2) {
    throw GridError("complex dimension must be 1 or 2");
  }
  if (N <= 0 || (N & (N - 1)) != 0) {
    throw GridError("resolution must be power of two");
  }
  if (N < 16 || N > 256) {
    throw GridError("resolution must lie in [16, 256]");
  }
  auto data = std::make_shared<detail::GridData>();
  data->n = n;
  data->N = N;
  const int axes = 2 * n;
  data->size = 1;
  for (int a = 0; a < axes; ++a) data->size *= static_cast<std::size_t>(N);
  data->wavenumbers.resize(N);
  for (int m = 0; m < N; ++m) data->wavenumbers[m] = m < N / 2 ? m : m - N;
  data->strides.assign(axes, 1);
  for (int a = axes - 2; a >= 0; --a) data->strides[a] = data->strides[a + 1] * N;
  data->derivative_k.resize(axes * data->size);
  data->dealias_keep.assign(data->size, 1);
  for (int a = 0; a < axes; ++a) {
    for (std::size_t p = 0; p < data->size; ++p) {
      const int k = data->wavenumbers[(p / data->strides[a]) % static_cast<std::size_t>(N)];
      data->derivative_k[a * data->size + p] = static_cast<std::int16_t>(k == -N / 2 ? 0 : k);
      if (std::abs(k) > N / 3) data->dealias_keep[p] = 0;
    }
  }

  // FFTW_ESTIMATE keeps plan selection (and therefore rounding) independent
  // of machine load, which the bitwise-reproducibility contract relies on.
  std::vector<int> dims(axes, N);
  CVec buffer(data->size);
  auto* scratch = reinterpret_cast<fftw_complex*>(buffer.data());
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    const unsigned flags = FFTW_ESTIMATE;
    data->forward = fftw_plan_dft(axes, dims.data(), scratch, scratch, FFTW_FORWARD, flags);
    data->backward = fftw_plan_dft(axes, dims.data(), scratch, scratch, FFTW_BACKWARD, flags);
  }
  if (!data->forward || !data->backward) throw std::runtime_error("FFT planning failed");
  return Grid(std::move(data));
}

int Grid::dim() const { return data_->n; }
int Grid::resolution() const { return data_->N; }
std::size_t Grid::size() const { return data_->size; }

int Grid::index(std::size_t point, int axis) const {
  return static_cast<int>((point / data_->strides[axis]) % static_cast<std::size_t>(data_->N));
}

double Grid::coordinate(std::size_t point, int axis) const {
  return static_cast<double>(index(point, axis)) / data_->N;
}

std::size_t Grid::shifted(std::size_t point, int axis, int shift) const {
  const int N = data_->N;
  const int m = index(point, axis);
  const int moved = ((m + shift) % N + N) % N;
  return point + static_cast<std::size_t>(moved - m) * data_->strides[axis];
}

std::span<const int> Grid::wavenumbers() const { return data_->wavenumbers; }

bool Grid::operator==(const Grid& other) const {
  if (data_ == other.data_) return true;
  if (!data_ || !other.data_) return false;
  return data_->n == other.data_->n && data_->N == other.data_->N;
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(const Grid& grid, cplx fill) : grid_(grid), values_(grid.size(), fill) {}

ScalarField::ScalarField(const Grid& grid, std::span<const cplx> values)
    : ScalarField(grid, CVec(values.begin(), values.end())) {}

ScalarField::ScalarField(const Grid& grid, CVec values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw std::invalid_argument("value count does not match grid");
}

ScalarField ScalarField::from_function(const Grid& grid,
                                       const std::function<cplx(std::span<const double>)>& fn) {
  ScalarField out(grid);
  std::vector<double> x(grid.axes());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    for (int a = 0; a < grid.axes(); ++a) x[a] = grid.coordinate(p, a);
    out[p] = fn(x);
  }
  return out;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(const ScalarField& other) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(cplx s) {
  for (auto& v : values_) v *= s;
  return *this;
}

ScalarField& ScalarField::axpy(cplx s, const ScalarField& other) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * other.values_[i];
  return *this;
}

ScalarField ScalarField::conj() const {
  ScalarField out(*this);
  for (auto& v : out.values_) v = std::conj(v);
  return out;
}

ScalarField ScalarField::real_part() const {
  ScalarField out(*this);
  for (auto& v : out.values_) v = v.real();
  return out;
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::norm(v));
  return std::sqrt(m);
}

double ScalarField::max_imag() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v.imag()));
  return m;
}

double ScalarField::max_real() const {
  return values_[argmax_real()].real();
}

double ScalarField::min_real() const {
  double m = values_.front().real();
  for (const auto& v : values_) m = std::min(m, v.real());
  return m;
}

std::size_t ScalarField::argmax_real() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values_.size(); ++i) {
    if (values_[i].real() > values_[best].real()) best = i;
  }
  return best;
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }
ScalarField operator*(cplx s, ScalarField a) { return a *= s; }

// ---------------------------------------------------------------------------

int thread_cap() {
  int cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("KRF_THREADS")) {
    const int requested = std::atoi(env);
    if (requested > 0) cap = std::min(cap, requested);
  }
  return cap;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(thread_cap(), std::max<std::size_t>(1, count / 4096));
  if (workers <= 1) {
    fn(0, count);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
}

}  // namespace krf
