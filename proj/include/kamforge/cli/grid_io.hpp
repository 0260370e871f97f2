#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kamforge/periodic_field.hpp"

namespace kamforge::cli {

// KAMG layout: "KAMG", u32 version, u32 dims, u32 resolution per axis, then little-endian f64
// samples in row-major order (axis 0 slowest).
struct GridFile {
  std::uint32_t version = 1;
  std::vector<std::uint32_t> resolution;
  std::vector<double> samples;
};

void write_grid(const std::string& path, const GridFile& grid);
GridFile read_grid(const std::string& path);

void write_field(const std::string& path, const PeriodicField& field);
// Requires equal resolution on every axis.
PeriodicField read_field(const std::string& path);

}  // namespace kamforge::cli
