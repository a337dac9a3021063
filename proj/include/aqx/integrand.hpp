#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aqx/expr.hpp"
#include "aqx/program.hpp"

namespace aqx {

/// f(x, y, xi) with a compiled evaluator, its xi-gradient, and the growth
/// metadata 0 <= f <= C (1 + |xi|^p).
class Integrand {
 public:
  Integrand() = default;
  /// `N` is the spatial dimension (x and y have N entries), `d` the number
  /// of components of xi.
  Integrand(Expr f, int N, int d, double p = 2.0, double C = 0.0);
  static Integrand parse(const std::string& text, int N, int d, double p = 2.0, double C = 0.0);

  const Expr& expr() const noexcept { return f_; }
  int N() const noexcept { return N_; }
  int d() const noexcept { return d_; }
  double p() const noexcept { return p_; }
  double C() const noexcept { return C_; }
  bool depends_on_x() const noexcept { return dep_x_; }
  bool depends_on_y() const noexcept { return dep_y_; }
  std::optional<double> y_bandwidth() const { return f_.y_bandwidth(); }

  /// False when some abs/min/max depends on xi; gradients then come from
  /// central differences with step 1e-6 (1 + |xi|).
  bool symbolic_gradient() const noexcept { return symbolic_; }
  /// Non-empty when the finite-difference fallback is in use.
  const std::string& gradient_warning() const noexcept { return warning_; }

  /// out[i] = f(x, y_i, xi_i); y rows have N entries (nullptr when f does
  /// not depend on y), xi rows have d entries.
  void values(std::span<const double> x, const double* y, const double* xi, std::size_t count,
              double* out) const;
  /// grad[i * d + k] = d f / d xi_k at (x, y_i, xi_i).
  void gradients(std::span<const double> x, const double* y, const double* xi, std::size_t count,
                 double* grad) const;

  double value(std::span<const double> x, std::span<const double> y,
               std::span<const double> xi) const;
  std::vector<double> gradient(std::span<const double> x, std::span<const double> y,
                               std::span<const double> xi) const;
  /// Central-difference gradient, used as fallback and as a cross-check.
  std::vector<double> fd_gradient(std::span<const double> x, std::span<const double> y,
                                  std::span<const double> xi) const;

  /// Largest |symbolic - central difference| / max(1, |symbolic|) over
  /// `samples` seeded points with xi in [-2, 2]^d. Zero when no symbolic
  /// gradient exists.
  double gradient_crosscheck(int samples, std::uint64_t seed) const;

  /// Smallest sampled value of f and largest sampled f / (1 + |xi|^p).
  struct GrowthSample {
    double min_value = 0.0;
    double max_ratio = 0.0;
  };
  GrowthSample sample_growth(int samples, std::uint64_t seed) const;

 private:
  BatchInputs inputs(std::span<const double> x, const double* y, const double* xi,
                     std::size_t count) const;

  Expr f_;
  int N_ = 0;
  int d_ = 0;
  double p_ = 2.0;
  double C_ = 0.0;
  bool dep_x_ = false;
  bool dep_y_ = false;
  bool symbolic_ = true;
  std::string warning_;
  Program value_prog_;
  std::vector<Program> grad_progs_;
};

}  // namespace aqx
