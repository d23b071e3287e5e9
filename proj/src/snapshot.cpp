#include "nsk/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>

namespace nsk {

namespace {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

void put_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); }

std::uint32_t get_u32(std::istream& is) {
  std::uint32_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw std::runtime_error("truncated snapshot header");
  return v;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const std::vector<NamedField>& fields) {
  if (fields.empty()) throw std::invalid_argument("snapshot needs at least one field");
  const Grid& grid = fields.front().field.grid();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write("NSKF", 4);
  put_u32(os, kSnapshotVersion);
  put_u32(os, static_cast<std::uint32_t>(grid.dim()));
  put_u32(os, static_cast<std::uint32_t>(grid.n()));
  put_u32(os, static_cast<std::uint32_t>(fields.size()));
  for (const auto& f : fields) {
    if (!(f.field.grid() == grid)) throw std::invalid_argument("snapshot fields must share one grid");
    put_u32(os, static_cast<std::uint32_t>(f.name.size()));
    os.write(f.name.data(), static_cast<std::streamsize>(f.name.size()));
  }
  for (const auto& f : fields)
    os.write(reinterpret_cast<const char*>(f.field.values().data()),
             static_cast<std::streamsize>(f.field.size() * sizeof(Real)));
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

std::vector<NamedField> read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "NSKF", 4) != 0) throw std::runtime_error("not an NSKF snapshot");
  const auto version = get_u32(is);
  if (version != kSnapshotVersion) throw std::runtime_error("unsupported snapshot version " + std::to_string(version));
  const auto dim = static_cast<int>(get_u32(is));
  const auto n = static_cast<int>(get_u32(is));
  const auto count = get_u32(is);
  const Grid grid(dim, n, Index{1} << 30);
  std::vector<std::string> names(count);
  for (auto& name : names) {
    name.resize(get_u32(is));
    if (!is.read(name.data(), static_cast<std::streamsize>(name.size()))) throw std::runtime_error("truncated name");
  }
  std::vector<NamedField> out;
  for (auto& name : names) {
    Eigen::ArrayXd v(grid.size());
    if (!is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(Real))))
      throw std::runtime_error("truncated snapshot data for field " + name);
    out.push_back({std::move(name), ScalarField(grid, std::move(v))});
  }
  return out;
}

void append_named(std::vector<NamedField>& out, const std::string& name, const VectorField& v) {
  for (int i = 0; i < v.dim(); ++i) out.push_back({name + "_" + std::to_string(i + 1), v[i]});
}

void write_csv_slice(const std::filesystem::path& path, const std::vector<NamedField>& fields) {
  if (fields.empty()) throw std::invalid_argument("csv slice needs at least one field");
  const Grid& grid = fields.front().field.grid();
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << "x";
  for (const auto& f : fields) os << ',' << f.name;
  os << '\n' << std::setprecision(17);
  const Index stride = grid.stride(0);
  for (int i = 0; i < grid.n(); ++i) {
    os << i * grid.spacing();
    for (const auto& f : fields) os << ',' << f.field[i * stride];
    os << '\n';
  }
}

}  // namespace nsk
