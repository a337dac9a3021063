#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "aqx/spectral.hpp"

namespace testing {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline aqx::PeriodicField sample(const aqx::Grid& g, int d,
                                 const std::function<void(const double*, double*)>& fn) {
  aqx::PeriodicField f(g, d);
  double x[3], v[8];
  for (std::size_t j = 0; j < g.size(); ++j) {
    g.coords(j, std::span<double>(x, static_cast<std::size_t>(g.dim())));
    fn(x, v);
    for (int c = 0; c < d; ++c) f.at(j, c) = v[c];
  }
  return f;
}

// Real field built from cos/sin modes with |lambda_i| <= band and gaussian weights.
inline aqx::PeriodicField random_modes(const aqx::Grid& g, int d, int band, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  struct Mode {
    int l1, l2, c;
    double a, b;
  };
  std::vector<Mode> modes;
  for (int l1 = 0; l1 <= band; ++l1)
    for (int l2 = -band; l2 <= band; ++l2) {
      if (l1 == 0 && l2 <= 0) continue;
      for (int c = 0; c < d; ++c) modes.push_back({l1, l2, c, gauss(rng), gauss(rng)});
    }
  return sample(g, d, [&](const double* x, double* v) {
    for (int c = 0; c < d; ++c) v[c] = 0.0;
    for (const auto& m : modes) {
      const double t = kTwoPi * (m.l1 * x[0] + m.l2 * x[1]);
      v[m.c] += (m.a * std::cos(t) + m.b * std::sin(t)) / (1.0 + m.l1 * m.l1 + m.l2 * m.l2);
    }
  });
}

inline double max_abs_diff(const aqx::PeriodicField& a, const aqx::PeriodicField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i)
    m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

}  // namespace testing
