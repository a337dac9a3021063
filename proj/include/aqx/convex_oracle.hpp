#pragma once

#include <functional>
#include <span>
#include <vector>

namespace aqx {

/// Convex envelope of f tabulated on a uniform grid over a box.
struct ConvexTable {
  std::vector<double> lo;
  std::vector<double> hi;
  int resolution = 0;          // points per axis, box corners included
  std::vector<double> values;  // last axis fastest
  std::vector<double> slope_range;  // dual box half-widths per axis

  double spacing(int axis) const;
  /// Multilinear interpolation; xi must lie in the box.
  double at(std::span<const double> xi) const;
};

/// Discrete double Legendre-Fenchel transform (biconjugate) of f sampled on
/// `resolution` points per axis of [lo, hi]. The dual grid has the same
/// resolution and spans the difference quotients of f on the middle half of
/// the box, so the table is reliable where the subgradients stay in that range.
/// Throws NumericalError("BoxTooSmall") when the first transform attains its
/// maximum on the box boundary for an interior dual point.
ConvexTable convex_envelope_oracle(const std::function<double(std::span<const double>)>& f,
                                   std::span<const double> lo, std::span<const double> hi,
                                   int resolution);

}  // namespace aqx
