#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "krf/run.hpp"

namespace krf {

// Version mismatch, truncation or checksum failure.
class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  FlowConfig config;
  double t = 0.0;
  long step = 0;
  double last_dt = 0.0;
  ScalarField u, w;
  std::vector<MonitorRecord> records;
  std::vector<ResidualReport> residuals;
  double f_sup = 0.0;
};

Checkpoint make_checkpoint(const FlowState& state, const RunResult& partial);

// Layout:
//   KRFLAB-CKPT v1\n
//   one JSON line: config, t, step, last_dt, f_sup, records, residuals\n
//   field dump of u, field dump of w
//   8-byte little-endian FNV-1a 64 checksum of everything above
void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);

// Written to a temporary file in the same directory, then renamed.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace krf
