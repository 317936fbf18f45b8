#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include "krf/grid.hpp"

namespace krf {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FieldKind { real, complex };

// Field dump layout:
//   KRFLAB-FIELD v1 n=<n> N=<N> kind=<real|complex>\n
// followed by little-endian binary64 samples in grid order, real parts first
// and, for kind=complex, imaginary parts after them.
void write_field(std::ostream& out, const ScalarField& field, FieldKind kind);
ScalarField read_field(std::istream& in);

void save_field(const std::filesystem::path& path, const ScalarField& field, FieldKind kind);
ScalarField load_field(const std::filesystem::path& path);

}  // namespace krf
