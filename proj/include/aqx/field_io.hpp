#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "aqx/spectral.hpp"

namespace aqx {

/// "AQXF v1" binary layout: magic `AQXF`, then u32 little-endian
/// version = 1, N, d, dims[0..N), then f64 little-endian values, node-major
/// (last axis fastest) with the component index fastest within a node.
///
/// Two-scale fields are written with N = 2n axes (macro axes first).
struct RawAqxf {
  std::vector<int> dims;
  int components = 0;
  std::vector<double> values;
};

void write_aqxf(std::ostream& out, const std::vector<int>& dims, int components,
                std::span<const double> values);
RawAqxf read_aqxf(std::istream& in);

void save_field(const std::string& path, const PeriodicField& field);
/// Loads a field; the domain tag is not stored in the file and is supplied here.
PeriodicField load_field(const std::string& path, Domain domain = Domain::cell);

class TwoScaleField;
/// Macro axes are read as a macro grid, micro axes as a cell grid.
void save_two_scale(const std::string& path, const TwoScaleField& field);
TwoScaleField load_two_scale(const std::string& path);

}  // namespace aqx
