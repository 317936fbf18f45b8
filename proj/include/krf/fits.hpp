#pragma once

#include <stdexcept>
#include <vector>

namespace krf {

class EmptySeries : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Envelope value <= A + B / t^k.
struct ShiFit {
  int k = 0;
  double A = 0.0;
  double B = 0.0;
  double t_split = 0.0;
  std::size_t samples = 0;
  std::size_t violations = 0;
};

// A = sup of the values at t >= t_split, B = sup over 0 < t < t_split of
// (value - A) t^k clamped at 0.  For k = 0 B is unused and A is the overall
// sup.  Samples at t <= 0 are covered trivially for k >= 1 and ignored.
ShiFit shi_fit(const std::vector<double>& t, const std::vector<double>& values, int k, double t_split);

// y <= slope * x + intercept with slope, intercept >= 0, choosing among all
// covering lines the one lowest at mean(x).
struct LinearEnvelope {
  double slope = 0.0;
  double intercept = 0.0;
  double max_violation = 0.0;  // largest y - line(x), <= 0 up to roundoff
};
LinearEnvelope fit_linear_envelope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace krf
