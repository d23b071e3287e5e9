#pragma once

#include "nsk/fields.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace nsk {

struct NamedField {
  std::string name;
  ScalarField field;
};

/// Binary snapshot layout (all integers little-endian u32):
///   "NSKF" | version | dim | n | field count |
///   per field: name length, name bytes |
///   per field: n^dim little-endian f64 samples, row-major.
inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(const std::filesystem::path& path, const std::vector<NamedField>& fields);
std::vector<NamedField> read_snapshot(const std::filesystem::path& path);

/// Expands a vector field into `name_1 ... name_d` scalar entries.
void append_named(std::vector<NamedField>& out, const std::string& name, const VectorField& v);

/// CSV of the 1D slice along axis 0 through the origin: header `x,<names>`.
void write_csv_slice(const std::filesystem::path& path, const std::vector<NamedField>& fields);

}  // namespace nsk
