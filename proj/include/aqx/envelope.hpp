#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aqx/exec.hpp"
#include "aqx/integrand.hpp"
#include "aqx/operator.hpp"

namespace aqx {

struct EnvelopeOptions {
  /// Micro grid points per axis; empty means 64 along every axis.
  std::vector<int> micro;
  /// Random spectral starts in addition to the zero start and warm starts.
  int random_starts = 8;
  int max_iter = 5000;
  /// Stop when |Pi grad|_2 <= tol * (1 + initial |Pi grad|_2).
  double tol = 1e-8;
  std::uint64_t seed = 20240601;
  /// Extra starting fields on the micro grid (projected before use).
  std::vector<PeriodicField> warm_starts;
  bool keep_minimizer = true;

  Grid grid(int N) const;
};

struct StartRecord {
  std::string kind;  // "zero", "warm" or "random"
  int index = 0;
  double sigma = 0.0;
  double value = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
};

struct EnvelopeResult {
  double value = 0.0;
  /// Cell average of f at w = 0.
  double baseline = 0.0;
  PeriodicField minimizer;
  std::vector<StartRecord> starts;
  int iterations = 0;
  double grad_norm = 0.0;
  std::vector<int> grid;
  std::vector<std::string> warnings;
};

/// Per-task seed from the master seed, a task tag, the (effective) macro
/// point, xi and nothing else; start indices are mixed in per start.
std::uint64_t task_seed(std::uint64_t master, std::uint64_t tag, std::span<const double> x,
                        std::span<const double> xi);

/// True when some coefficient of the operator depends on x.
bool depends_on_x(const Operator& op);

/// Minimizes the cell average of y -> f(x, s y, xi + w(y)) over mean-zero
/// w with Pi(x) w = w by multistart projected gradient descent with Armijo
/// backtracking. `y_scale` = 0 evaluates f without binding y; otherwise y is
/// bound to y_scale * y reduced to the unit cell.
EnvelopeResult minimize_cell(const PointProjector& pp, const Integrand& f,
                             std::span<const double> xi, int y_scale,
                             const EnvelopeOptions& opts, std::uint64_t seed);

/// Q_A f(x, xi) for an integrand without y-dependence.
EnvelopeResult qa_envelope(const Operator& op, const Integrand& f, std::span<const double> x,
                           std::span<const double> xi, const EnvelopeOptions& opts);

/// Seed used by qa_envelope for (x, xi); identical frozen problems share it.
std::uint64_t envelope_seed(const Operator& op, const Integrand& f, std::uint64_t master,
                            std::span<const double> x, std::span<const double> xi);

struct EnvelopeField {
  PeriodicField values;  // one component: x -> Q_A f(x, u(x))
  std::vector<EnvelopeResult> nodes;
};

/// qa_envelope at every macro node of u with coefficients frozen there.
EnvelopeField pointwise_envelope_field(const Operator& op, const Integrand& f,
                                       const PeriodicField& u, const EnvelopeOptions& opts,
                                       Exec exec = Exec::parallel);

}  // namespace aqx
