#pragma once

#include <array>
#include <string>
#include <vector>

#include "fincap/pde.hpp"

namespace fincap::pde {

/// Contents of a serialized field. The binary file is
///   "FINCAPF1" | int64 dims[3] | double spacing[3] | double origin[3] |
///   uint64 n | n bytes of UTF-8 JSON metadata | double values[], x fastest
/// in little-endian order. spacing is the smallest cell per axis; the JSON
/// holds the problem metadata and the full (possibly graded) axes.
struct FieldFile {
  std::array<long long, 3> dims{};
  std::array<double, 3> spacing{};
  std::array<double, 3> origin{};
  std::array<std::vector<double>, 3> axes;
  FieldMeta meta;
  std::vector<double> values;
  std::string metadata;  // raw JSON text
};

/// Writes `path` and a summary `path + ".json"`.
void write_field(const ScalarField& field, const std::string& path);
FieldFile read_field(const std::string& path);

}  // namespace fincap::pde
