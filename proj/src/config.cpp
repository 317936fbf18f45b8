#include "krf/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "krf/spectral.hpp"

namespace krf {

using nlohmann::json;

ScalarField PotentialSpec::build(const Grid& grid) const {
  switch (kind) {
    case Kind::zero:
      return ScalarField(grid);
    case Kind::bandlimited:
      return random_bandlimited(grid, K, amplitude, seed);
    case Kind::cosine: {
      if (axis < 0 || axis >= grid.axes()) throw ConfigError("cosine axis out of range");
      const double a = amplitude;
      const int ax = axis;
      return ScalarField::from_function(grid, [a, ax](std::span<const double> x) {
        return cplx(a * std::cos(2.0 * std::numbers::pi * x[ax]));
      });
    }
  }
  throw ConfigError("unknown potential kind");
}

void FlowConfig::validate(bool for_run) const {
  try {
    Grid::make(n, N);
  } catch (const GridError& e) {
    throw ConfigError(e.what());
  }
  if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
  if (dt_fixed && !(*dt_fixed > 0.0)) throw ConfigError("fixed dt must be positive");
  if (cadence < 1) throw ConfigError("cadence must be at least 1");
  if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be non-negative");
  if (!(margin > 0.0)) throw ConfigError("margin must be positive");
  if (for_run && c != 0.0) throw ConfigError("flow runs support c = 0 only (torus Kaehler class)");
  if (k_max < 0 || k_max > 2) throw ConfigError("k_max must be 0, 1 or 2");
  if (m_max < 1 || m_max > 3) throw ConfigError("m_max must be 1, 2 or 3");
  if (!(t_split_fraction > 0.0 && t_split_fraction < 1.0)) throw ConfigError("t_split fraction must lie in (0, 1)");
  if (!(ceq_bound >= 1.0)) throw ConfigError("ceq_bound must be at least 1");
  for (const PotentialSpec* p : {&initial, &reference}) {
    if (p->kind == PotentialSpec::Kind::bandlimited) {
      if (p->K < 1 || p->K > N / 3) throw ConfigError("band limit K must satisfy 1 <= K <= N/3");
      if (!(p->amplitude > 0.0)) throw ConfigError("amplitude must be positive");
    }
    if (p->kind == PotentialSpec::Kind::cosine && (p->axis < 0 || p->axis >= 2 * n)) {
      throw ConfigError("cosine axis out of range");
    }
  }
}

json to_json(const PotentialSpec& p) {
  switch (p.kind) {
    case PotentialSpec::Kind::zero:
      return json{{"kind", "zero"}};
    case PotentialSpec::Kind::bandlimited:
      return json{{"kind", "bandlimited"}, {"K", p.K}, {"amplitude", p.amplitude}, {"seed", p.seed}};
    case PotentialSpec::Kind::cosine:
      return json{{"kind", "cosine"}, {"amplitude", p.amplitude}, {"axis", p.axis}};
  }
  return json{};
}

PotentialSpec potential_from_json(const json& j) {
  PotentialSpec p;
  const std::string kind = j.value("kind", "zero");
  if (kind == "zero" || kind == "flat") {
    p.kind = PotentialSpec::Kind::zero;
  } else if (kind == "bandlimited") {
    p.kind = PotentialSpec::Kind::bandlimited;
  } else if (kind == "cosine") {
    p.kind = PotentialSpec::Kind::cosine;
  } else {
    throw ConfigError("unknown potential kind: " + kind);
  }
  p.K = j.value("K", 1);
  p.amplitude = j.value("amplitude", 0.0);
  p.seed = j.value("seed", std::uint64_t{0});
  p.axis = j.value("axis", 0);
  return p;
}

json to_json(const FlowConfig& c) {
  json j{{"n", c.n},
         {"N", c.N},
         {"c", c.c},
         {"t_end", c.t_end},
         {"cfl", c.cfl},
         {"cadence", c.cadence},
         {"checkpoint_every", c.checkpoint_every},
         {"margin", c.margin},
         {"initial", to_json(c.initial)},
         {"reference", to_json(c.reference)},
         {"k_max", c.k_max},
         {"m_max", c.m_max},
         {"dealias", c.dealias},
         {"t_split_fraction", c.t_split_fraction},
         {"ceq_bound", c.ceq_bound}};
  if (c.dt_fixed) j["dt_fixed"] = *c.dt_fixed;
  if (c.forcing) j["forcing"] = to_json(*c.forcing);
  return j;
}

FlowConfig config_from_json(const json& j) {
  try {
    FlowConfig c;
    c.n = j.value("n", c.n);
    c.N = j.value("N", c.N);
    c.c = j.value("c", c.c);
    c.t_end = j.value("t_end", c.t_end);
    c.cfl = j.value("cfl", c.cfl);
    if (j.contains("dt_fixed") && !j["dt_fixed"].is_null()) c.dt_fixed = j["dt_fixed"].get<double>();
    c.cadence = j.value("cadence", c.cadence);
    c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
    c.margin = j.value("margin", c.margin);
    if (j.contains("initial")) c.initial = potential_from_json(j["initial"]);
    if (j.contains("reference")) c.reference = potential_from_json(j["reference"]);
    if (j.contains("forcing") && !j["forcing"].is_null()) c.forcing = potential_from_json(j["forcing"]);
    c.k_max = j.value("k_max", c.k_max);
    c.m_max = j.value("m_max", c.m_max);
    c.dealias = j.value("dealias", c.dealias);
    c.t_split_fraction = j.value("t_split_fraction", c.t_split_fraction);
    c.ceq_bound = j.value("ceq_bound", c.ceq_bound);
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

FlowConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: " + assignment);
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;  // bare strings such as kind=cosine
  }
  json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

}  // namespace krf
