#include "krf/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "krf/field_io.hpp"
#include "krf/report.hpp"

namespace krf {

namespace {
constexpr const char* kMagic = "KRFLAB-CKPT v1";
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Checkpoint make_checkpoint(const FlowState& state, const RunResult& partial) {
  Checkpoint c;
  c.config = partial.config;
  c.t = state.t;
  c.step = state.step;
  c.last_dt = state.last_dt;
  c.u = state.u;
  c.w = state.w;
  c.records = partial.records;
  c.residuals = partial.residuals;
  c.f_sup = partial.f_sup;
  return c;
}

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  nlohmann::json meta{{"config", to_json(ckpt.config)},
                      {"t", ckpt.t},
                      {"step", ckpt.step},
                      {"last_dt", ckpt.last_dt},
                      {"f_sup", ckpt.f_sup}};
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : ckpt.records) records.push_back(to_json(r));
  meta["records"] = std::move(records);
  meta["residuals"] = residuals_json(ckpt.residuals)["reports"];

  std::ostringstream body;
  body << kMagic << '\n' << meta.dump() << '\n';
  write_field(body, ckpt.u, FieldKind::complex);
  write_field(body, ckpt.w, FieldKind::complex);
  const std::string bytes = body.str();
  const std::uint64_t sum = fnv1a64(bytes);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  for (int i = 0; i < 8; ++i) out.put(static_cast<char>((sum >> (8 * i)) & 0xff));
  if (!out) throw CheckpointError("checkpoint write failed");
}

Checkpoint read_checkpoint(std::istream& in) {
  const std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (all.rfind(std::string(kMagic) + "\n", 0) != 0) {
    if (all.rfind("KRFLAB-CKPT", 0) == 0) throw CheckpointError("unsupported checkpoint version");
    throw CheckpointError("not a checkpoint file");
  }
  if (all.size() < 8) throw CheckpointError("checkpoint truncated");
  const std::string_view payload(all.data(), all.size() - 8);
  std::uint64_t stored = 0;
  for (int i = 0; i < 8; ++i) stored |= static_cast<std::uint64_t>(static_cast<unsigned char>(all[all.size() - 8 + i])) << (8 * i);
  if (fnv1a64(payload) != stored) throw CheckpointError("checkpoint checksum mismatch (corrupt or truncated)");

  std::istringstream body{std::string(payload)};
  std::string line;
  std::getline(body, line);
  std::getline(body, line);
  Checkpoint c;
  try {
    const auto meta = nlohmann::json::parse(line);
    c.config = config_from_json(meta.at("config"));
    c.t = meta.at("t").get<double>();
    c.step = meta.at("step").get<long>();
    c.last_dt = meta.at("last_dt").get<double>();
    c.f_sup = meta.at("f_sup").get<double>();
    for (const auto& r : meta.at("records")) c.records.push_back(record_from_json(r));
    for (const auto& r : meta.at("residuals")) c.residuals.push_back(residual_from_json(r));
    c.u = read_field(body);
    c.w = read_field(body);
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("checkpoint metadata invalid: ") + e.what());
  } catch (const FormatError& e) {
    throw CheckpointError(std::string("checkpoint field invalid: ") + e.what());
  }
  if (c.u.grid().dim() != c.config.n || c.u.grid().resolution() != c.config.N) {
    throw CheckpointError("checkpoint fields do not match its configuration");
  }
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot open " + tmp.string());
    write_checkpoint(out, ckpt);
    out.flush();
    if (!out) throw CheckpointError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path.string());
  return read_checkpoint(in);
}

}  // namespace krf
