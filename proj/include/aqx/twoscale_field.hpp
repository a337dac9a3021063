#pragma once

#include <vector>

#include "aqx/spectral.hpp"

namespace aqx {

/// w(x_j, y_k) on a macro grid over Omega times a micro grid over Q.
/// Storage is macro-node major, then micro node, then component.
class TwoScaleField {
 public:
  TwoScaleField() = default;
  TwoScaleField(Grid macro, Grid micro, int components);

  const Grid& macro() const noexcept { return macro_; }
  const Grid& micro() const noexcept { return micro_; }
  int components() const noexcept { return components_; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double& at(std::size_t xnode, std::size_t ynode, int c) {
    return values_[(xnode * micro_.size() + ynode) * components_ + c];
  }
  double at(std::size_t xnode, std::size_t ynode, int c) const {
    return values_[(xnode * micro_.size() + ynode) * components_ + c];
  }

  /// Copy of the micro field w(x_j, .).
  PeriodicField slice(std::size_t xnode) const;
  void set_slice(std::size_t xnode, const PeriodicField& w);

  /// Cell average x -> int_Q w(x, y) dy as a macro field.
  PeriodicField cell_mean() const;

  /// Midpoint-rule L^p norm over Omega x Q.
  double lp_norm(double p) const;

 private:
  Grid macro_;
  Grid micro_;
  int components_ = 0;
  std::vector<double> values_;
};

}  // namespace aqx
