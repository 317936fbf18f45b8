#include "krf/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace krf {

namespace {

void put_double(std::ostream& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  unsigned char bytes[8];
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_double(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw FormatError("field dump truncated");
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_field(std::ostream& out, const ScalarField& field, FieldKind kind) {
  const Grid& g = field.grid();
  out << "KRFLAB-FIELD v1 n=" << g.dim() << " N=" << g.resolution()
      << " kind=" << (kind == FieldKind::real ? "real" : "complex") << '\n';
  for (const auto& v : field.values()) put_double(out, v.real());
  if (kind == FieldKind::complex) {
    for (const auto& v : field.values()) put_double(out, v.imag());
  }
}

ScalarField read_field(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw FormatError("missing field header");
  std::istringstream hs(header);
  std::string magic, version, n_tok, N_tok, kind_tok;
  hs >> magic >> version >> n_tok >> N_tok >> kind_tok;
  if (magic != "KRFLAB-FIELD") throw FormatError("not a field dump");
  if (version != "v1") throw FormatError("unsupported field dump version: " + version);
  if (n_tok.rfind("n=", 0) != 0 || N_tok.rfind("N=", 0) != 0 || kind_tok.rfind("kind=", 0) != 0) {
    throw FormatError("malformed field header");
  }
  const int n = std::stoi(n_tok.substr(2));
  const int N = std::stoi(N_tok.substr(2));
  const std::string kind = kind_tok.substr(5);
  if (kind != "real" && kind != "complex") throw FormatError("unknown field kind: " + kind);
  const Grid grid = Grid::make(n, N);
  CVec values(grid.size());
  for (auto& v : values) v = get_double(in);
  if (kind == "complex") {
    for (auto& v : values) v.imag(get_double(in));
  }
  return ScalarField(grid, std::move(values));
}

void save_field(const std::filesystem::path& path, const ScalarField& field, FieldKind kind) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  write_field(out, field, kind);
}

ScalarField load_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_field(in);
}

}  // namespace krf
