#pragma once

#include <string>
#include <vector>

#include "krf/flow.hpp"

namespace krf {

struct Extrema {
  double min = 0.0;
  double max = 0.0;
};
Extrema real_extrema(const ScalarField& f);

// S = g0^{jbar i} g_{i jbar}.
ScalarField monitor_S(const MetricField& g, const MetricField& g0);
// Q = |g_{i jbar;k}|^2 with g on every slot; ';' is the reference connection.
ScalarField monitor_Q(const MetricField& g, const Reference& ref);
// Q_m = |nabla0^m g|^2 with g0 on every slot, summed over the 2^m direction
// patterns.
ScalarField monitor_Qm(const MetricField& g, const Reference& ref, int m);

struct MonitorRecord {
  double t = 0.0;
  long step = 0;
  double s_min = 0.0, s_max = 0.0;
  double q_sup = 0.0;
  std::vector<double> qm_sup;  // m = 1..m_max
  std::vector<double> rm_sup;  // sup |nabla^k Rm|^2_g, k = 0..k_max
  double lam_min = 1.0, lam_max = 1.0, c_eq = 1.0;
  double volume = 1.0;  // integral of det g
  double w_sup = 0.0;
  double ric_sup = 0.0;
  double gauss_bonnet = 0.0;  // integral of g^{jbar i} R_{i jbar} det g
};

MonitorRecord make_record(const FlowState& state, const FlowContext& ctx);

// Three snapshots equally spaced in time.
struct Window {
  FlowState prev, mid, next;
  double spacing() const { return mid.t - prev.t; }
};

struct ResidualReport {
  std::string identity;
  double residual = 0.0;
  double scale = 1.0;      // magnitude of the dominant term
  double tolerance = 0.0;  // relative; the bound is tolerance * scale
  bool pass = true;
  std::vector<double> times;

  double bound() const { return tolerance * scale; }
};

ResidualReport make_report(std::string identity, double residual, double scale, double bound,
                           std::vector<double> times);

// Centered time differences against spatially assembled right sides:
//   flow_equation  d/dt g_{i jbar} = -R_{i jbar} + c g_{i jbar}
//   s_evolution    (d/dt - Lap) S = c S - g0^{jbar i} g^{lbar k} g^{qbar p} g_{i qbar;k} g_{p jbar;lbar}
//                                   - g0^{jbar i} R0_{i qbar k lbar} g0^{qbar p} g_{p jbar} g^{lbar k}
//   gk_evolution   d/dt g_{i jbar;k} = -(nabla_k R_{i jbar} + g^{dbar a} R_{a jbar} g_{i dbar;k})
//                                      + c g_{i jbar;k}
//   w_evolution    d/dt w = Lap w + c w
// Each bound is 4 dt^2 times an estimate of the third time derivative plus
// a spatial floor.
std::vector<ResidualReport> evolution_residuals(const Window& window, const FlowContext& ctx);

// Per-point data of the Q evolution at the middle of a window.
struct QDecomposition {
  std::vector<double> q;        // Q
  std::vector<double> heat_q;   // (d/dt - Lap) Q
  std::vector<double> square1;  // the two square sums in the normal frame
  std::vector<double> square2;
  std::vector<double> remainder;  // (d/dt - Lap) Q + squares
  std::vector<double> s;          // S
  std::vector<double> heat_s;     // (d/dt - Lap) S
  std::vector<double> quad_s;     // g0^{jbar i} g^{lbar k} g^{qbar p} g_{i qbar;k} g_{p jbar;lbar}
  std::size_t excluded = 0;       // points where the normal frame failed
  std::vector<bool> valid;
  double t = 0.0;
};

class DiagonalizationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws DiagonalizationFailure when more than 1% of the points had to be
// excluded.
QDecomposition q_evolution_decomposition(const Window& window, const FlowContext& ctx);

// Same square sums written tensorially:
//   |g_{i kbar;j lbar} - g^{cbar d} g_{i cbar;j} g_{d kbar;lbar}|^2_g and
//   |g_{i qbar;k m} - g^{abar b}(g_{b qbar;i} g_{k abar;m} + g_{b qbar;m} g_{i abar;k})|^2_g.
std::pair<ScalarField, ScalarField> q_squares_tensorial(const MetricField& g, const Reference& ref);

struct MaxPrincipleReport {
  std::size_t point = 0;
  double value = 0.0;
  double gradient = 0.0;  // |grad h|_g at the grid argmax
  double gradient_tolerance = 0.0;
  double laplacian = 0.0;
  double laplacian_tolerance = 0.0;
  bool pass = true;
};

// Discrete maximum principle at the grid argmax of Re h.  The tolerances
// bound the distance to the continuous maximum by half a cell diagonal.
MaxPrincipleReport max_principle_check(const ScalarField& h, const MetricField& g);

}  // namespace krf
