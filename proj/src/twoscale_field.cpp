#include "aqx/twoscale_field.hpp"

#include <cmath>

#include "aqx/errors.hpp"

namespace aqx {

TwoScaleField::TwoScaleField(Grid macro, Grid micro, int components)
    : macro_(std::move(macro)), micro_(std::move(micro)), components_(components) {
  if (macro_.domain() != Domain::macro || micro_.domain() != Domain::cell)
    throw ConfigError("InvalidGrid", "twoscale: expected a macro grid and a cell grid");
  if (components_ < 1) throw ConfigError("InvalidGrid", "twoscale: need at least one component");
  values_.assign(macro_.size() * micro_.size() * static_cast<std::size_t>(components_), 0.0);
}

PeriodicField TwoScaleField::slice(std::size_t xnode) const {
  const std::size_t len = micro_.size() * static_cast<std::size_t>(components_);
  const auto first = values_.begin() + static_cast<std::ptrdiff_t>(xnode * len);
  return PeriodicField(micro_, components_,
                       std::vector<double>(first, first + static_cast<std::ptrdiff_t>(len)));
}

void TwoScaleField::set_slice(std::size_t xnode, const PeriodicField& w) {
  if (!(w.grid() == micro_) || w.components() != components_)
    throw ConfigError("ShapeMismatch", "twoscale: slice shape does not match");
  const std::size_t len = micro_.size() * static_cast<std::size_t>(components_);
  std::copy(w.values().begin(), w.values().end(),
            values_.begin() + static_cast<std::ptrdiff_t>(xnode * len));
}

PeriodicField TwoScaleField::cell_mean() const {
  PeriodicField out(macro_, components_);
  const double inv = 1.0 / static_cast<double>(micro_.size());
  for (std::size_t j = 0; j < macro_.size(); ++j)
    for (std::size_t k = 0; k < micro_.size(); ++k)
      for (int c = 0; c < components_; ++c) out.at(j, c) += at(j, k, c) * inv;
  return out;
}

double TwoScaleField::lp_norm(double p) const {
  double s = 0.0;
  const std::size_t points = macro_.size() * micro_.size();
  for (std::size_t i = 0; i < points; ++i) {
    double n2 = 0.0;
    for (int c = 0; c < components_; ++c) {
      const double v = values_[i * static_cast<std::size_t>(components_) + static_cast<std::size_t>(c)];
      n2 += v * v;
    }
    s += p == 2.0 ? n2 : std::pow(std::sqrt(n2), p);
  }
  s /= static_cast<double>(points);
  return p == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / p);
}

}  // namespace aqx
