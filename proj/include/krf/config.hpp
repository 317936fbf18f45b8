#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "krf/grid.hpp"

namespace krf {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Describes a scalar potential on the grid.
struct PotentialSpec {
  enum class Kind { zero, bandlimited, cosine };
  Kind kind = Kind::zero;
  int K = 1;               // band limit (bandlimited)
  double amplitude = 0.0;  // max-norm (bandlimited) or coefficient (cosine)
  std::uint64_t seed = 0;  // bandlimited
  int axis = 0;            // real axis of the cosine, 0..2n-1

  ScalarField build(const Grid& grid) const;
  bool operator==(const PotentialSpec&) const = default;
};

struct FlowConfig {
  int n = 1;
  int N = 64;
  double c = 0.0;
  double t_end = 1.0;
  double cfl = 0.4;
  std::optional<double> dt_fixed;
  int cadence = 100;           // steps between monitor records
  int checkpoint_every = 0;    // steps between checkpoints, 0 = never
  double margin = 0.05;
  PotentialSpec initial;
  PotentialSpec reference;
  std::optional<PotentialSpec> forcing;  // replaces the Ricci potential when set
  int k_max = 2;
  int m_max = 3;
  bool dealias = true;
  double t_split_fraction = 0.1;
  double ceq_bound = 10.0;

  // Throws ConfigError on violated invariants.  Flow runs additionally need
  // c == 0; frozen-time checks may use any c.
  void validate(bool for_run = true) const;
  bool operator==(const FlowConfig&) const = default;
};

nlohmann::json to_json(const PotentialSpec& p);
PotentialSpec potential_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FlowConfig& c);
FlowConfig config_from_json(const nlohmann::json& j);
FlowConfig load_config(const std::string& path);

// Applies a dotted override such as "initial.amplitude=0.02" or "N=96".
void apply_override(nlohmann::json& config, const std::string& assignment);

}  // namespace krf
