#pragma once

#include <fftw3.h>

#include <cstdint>
#include <mutex>
#include <vector>

#include "krf/grid.hpp"

namespace krf::detail {

struct GridData {
  int n = 0;
  int N = 0;
  std::size_t size = 0;
  std::vector<int> wavenumbers;
  std::vector<std::size_t> strides;  // per real axis
  // Per point wavenumber with the Nyquist row mapped to zero, [axis * size + p].
  std::vector<std::int16_t> derivative_k;
  // Per point flag for the 2/3 rule.
  std::vector<unsigned char> dealias_keep;

  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  GridData() = default;
  GridData(const GridData&) = delete;
  GridData& operator=(const GridData&) = delete;
  ~GridData();
};

// FFTW's planner is not reentrant.
std::mutex& fftw_planner_mutex();

}  // namespace krf::detail
