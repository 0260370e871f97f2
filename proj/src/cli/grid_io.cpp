#include "kamforge/cli/grid_io.hpp"

#include <cstring>
#include <fstream>

#include "kamforge/errors.hpp"

namespace kamforge::cli {
namespace {

constexpr char kMagic[4] = {'K', 'A', 'M', 'G'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& os, double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, sizeof v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& is, const std::string& path) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw ConfigError(path + ": truncated KAMG header");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is, const std::string& path) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw ConfigError(path + ": truncated KAMG samples");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double d;
  std::memcpy(&d, &v, sizeof d);
  return d;
}

}  // namespace

void write_grid(const std::string& path, const GridFile& grid) {
  std::size_t count = 1;
  for (auto r : grid.resolution) count *= r;
  if (grid.resolution.empty() || count != grid.samples.size()) {
    throw DomainError("grid resolution does not match the sample count");
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  os.write(kMagic, 4);
  put_u32(os, kVersion);
  put_u32(os, static_cast<std::uint32_t>(grid.resolution.size()));
  for (auto r : grid.resolution) put_u32(os, r);
  for (double d : grid.samples) put_f64(os, d);
  if (!os) throw Error("write failed: " + path);
}

GridFile read_grid(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError(path + ": cannot open");
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw ConfigError(path + ": not a KAMG file");
  GridFile g;
  g.version = get_u32(is, path);
  if (g.version != kVersion) throw ConfigError(path + ": unsupported KAMG version " + std::to_string(g.version));
  const std::uint32_t dims = get_u32(is, path);
  if (dims == 0 || dims > 8) throw ConfigError(path + ": invalid dimension count");
  std::size_t count = 1;
  for (std::uint32_t d = 0; d < dims; ++d) {
    g.resolution.push_back(get_u32(is, path));
    count *= g.resolution.back();
  }
  if (count == 0 || count > (std::size_t{1} << 30)) throw ConfigError(path + ": invalid resolution");
  g.samples.resize(count);
  for (auto& s : g.samples) s = get_f64(is, path);
  return g;
}

void write_field(const std::string& path, const PeriodicField& field) {
  GridFile g;
  g.resolution.assign(field.dims(), static_cast<std::uint32_t>(field.resolution()));
  g.samples = field.samples();
  write_grid(path, g);
}

PeriodicField read_field(const std::string& path) {
  GridFile g = read_grid(path);
  for (auto r : g.resolution) {
    if (r != g.resolution[0]) throw ConfigError(path + ": periodic fields need equal resolution on every axis");
  }
  return PeriodicField::from_samples(static_cast<int>(g.resolution.size()), static_cast<int>(g.resolution[0]),
                                     std::move(g.samples));
}

}  // namespace kamforge::cli
