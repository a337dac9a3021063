#include "aqx/integrand.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "aqx/errors.hpp"

namespace aqx {

using expr::VarKind;

Integrand::Integrand(Expr f, int N, int d, double p, double C)
    : f_(std::move(f)), N_(N), d_(d), p_(p), C_(C) {
  if (N_ < 1 || N_ > 3 || d_ < 1 || d_ > 64)
    throw ConfigError("InvalidIntegrand", "integrand: invalid dimensions");
  if (!(p_ > 1.0) || !std::isfinite(p_))
    throw ConfigError("InvalidIntegrand", "integrand: growth exponent p must lie in (1, inf)");
  if (f_.max_index(VarKind::xi) > d_)
    throw ConfigError("InvalidIntegrand", "integrand: uses xi beyond d = " + std::to_string(d_));
  if (f_.max_index(VarKind::x) > N_ || f_.max_index(VarKind::y) > N_)
    throw ConfigError("InvalidIntegrand", "integrand: uses x or y beyond N = " + std::to_string(N_));
  dep_x_ = f_.depends_on(VarKind::x);
  dep_y_ = f_.depends_on(VarKind::y);
  value_prog_ = Program(f_);
  try {
    for (const auto& g : f_.grad_xi(d_)) grad_progs_.emplace_back(g);
  } catch (const NumericalError& e) {
    if (e.code() != "NonDifferentiable") throw;
    symbolic_ = false;
    grad_progs_.clear();
    warning_ = std::string(e.what()) + "; using central differences";
  }
}

Integrand Integrand::parse(const std::string& text, int N, int d, double p, double C) {
  return Integrand(Expr::parse(text), N, d, p, C);
}

BatchInputs Integrand::inputs(std::span<const double> x, const double* y, const double* xi,
                              std::size_t count) const {
  BatchInputs in;
  in.x = x;
  in.y = y;
  in.y_stride = N_;
  in.y_count = y ? N_ : 0;
  in.xi = xi;
  in.xi_stride = d_;
  in.xi_count = d_;
  in.count = count;
  return in;
}

void Integrand::values(std::span<const double> x, const double* y, const double* xi,
                       std::size_t count, double* out) const {
  value_prog_.run(inputs(x, y, xi, count), std::span<double>(out, count));
}

void Integrand::gradients(std::span<const double> x, const double* y, const double* xi,
                          std::size_t count, double* grad) const {
  const auto d = static_cast<std::size_t>(d_);
  std::vector<double> column(count);
  if (symbolic_) {
    const auto in = inputs(x, y, xi, count);
    for (std::size_t k = 0; k < d; ++k) {
      grad_progs_[k].run(in, column);
      for (std::size_t i = 0; i < count; ++i) grad[i * d + k] = column[i];
    }
    return;
  }
  std::vector<double> shifted(xi, xi + count * d);
  std::vector<double> plus(count);
  std::vector<double> step(count);
  for (std::size_t i = 0; i < count; ++i) {
    double n2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) n2 += xi[i * d + k] * xi[i * d + k];
    step[i] = 1e-6 * (1.0 + std::sqrt(n2));
  }
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < count; ++i) shifted[i * d + k] = xi[i * d + k] + step[i];
    values(x, y, shifted.data(), count, plus.data());
    for (std::size_t i = 0; i < count; ++i) shifted[i * d + k] = xi[i * d + k] - step[i];
    values(x, y, shifted.data(), count, column.data());
    for (std::size_t i = 0; i < count; ++i) {
      grad[i * d + k] = (plus[i] - column[i]) / (2.0 * step[i]);
      shifted[i * d + k] = xi[i * d + k];
    }
  }
}

double Integrand::value(std::span<const double> x, std::span<const double> y,
                        std::span<const double> xi) const {
  return f_.eval(Bindings{x, y, xi});
}

std::vector<double> Integrand::gradient(std::span<const double> x, std::span<const double> y,
                                        std::span<const double> xi) const {
  std::vector<double> g(static_cast<std::size_t>(d_));
  gradients(x, y.empty() ? nullptr : y.data(), xi.data(), 1, g.data());
  return g;
}

std::vector<double> Integrand::fd_gradient(std::span<const double> x, std::span<const double> y,
                                           std::span<const double> xi) const {
  double n2 = 0.0;
  for (double v : xi) n2 += v * v;
  const double h = 1e-6 * (1.0 + std::sqrt(n2));
  std::vector<double> pt(xi.begin(), xi.end());
  std::vector<double> g(static_cast<std::size_t>(d_));
  for (std::size_t k = 0; k < g.size(); ++k) {
    pt[k] = xi[k] + h;
    const double fp = f_.eval(Bindings{x, y, pt});
    pt[k] = xi[k] - h;
    const double fm = f_.eval(Bindings{x, y, pt});
    pt[k] = xi[k];
    g[k] = (fp - fm) / (2.0 * h);
  }
  return g;
}

double Integrand::gradient_crosscheck(int samples, std::uint64_t seed) const {
  if (!symbolic_) return 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  std::uniform_real_distribution<double> box(-2.0, 2.0);
  std::vector<double> x(static_cast<std::size_t>(N_)), y(x.size()), xi(static_cast<std::size_t>(d_));
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    for (auto& v : x) v = unit(rng) + 0.5;
    for (auto& v : y) v = unit(rng);
    for (auto& v : xi) v = box(rng);
    const auto gs = gradient(x, y, xi);
    const auto gf = fd_gradient(x, y, xi);
    for (std::size_t k = 0; k < gs.size(); ++k)
      worst = std::max(worst, std::abs(gs[k] - gf[k]) / std::max(1.0, std::abs(gs[k])));
  }
  return worst;
}

Integrand::GrowthSample Integrand::sample_growth(int samples, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  std::uniform_real_distribution<double> box(-4.0, 4.0);
  std::vector<double> x(static_cast<std::size_t>(N_)), y(x.size()), xi(static_cast<std::size_t>(d_));
  GrowthSample g;
  g.min_value = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    for (auto& v : x) v = unit(rng) + 0.5;
    for (auto& v : y) v = unit(rng);
    for (auto& v : xi) v = box(rng);
    double n2 = 0.0;
    for (double v : xi) n2 += v * v;
    const double f = value(x, y, xi);
    g.min_value = std::min(g.min_value, f);
    g.max_ratio = std::max(g.max_ratio, f / (1.0 + std::pow(std::sqrt(n2), p_)));
  }
  return g;
}

}  // namespace aqx
