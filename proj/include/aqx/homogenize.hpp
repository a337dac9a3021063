#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aqx/envelope.hpp"
#include "aqx/exec.hpp"
#include "aqx/twoscale_field.hpp"

namespace aqx {

/// Cell problem at oscillation scale n: minimize the cell average of
/// y -> f(x, n y, xi + w(y)) over the constraint class at x. The scale-n
/// problem is discretized on the micro grid refined n times, so each period
/// of f keeps the same resolution. `warm` seeds an extra start.
/// Throws ConfigError("GridIncompatible") unless n is a power of two and
/// ConfigError("UnresolvableIntegrand") when the y-bandwidth of f reaches the
/// Nyquist limit of the micro grid.
EnvelopeResult cell_problem(const Operator& op, const Integrand& f, std::span<const double> x,
                            std::span<const double> xi, int n, const EnvelopeOptions& opts,
                            const PeriodicField* warm = nullptr);

/// w(y) -> w(k y mod 1) on the grid refined k times.
PeriodicField replicate(const PeriodicField& w, int k);

struct CellTrace {
  std::vector<int> n_list;
  std::vector<double> values;
  double fhom_estimate = 0.0;
  std::vector<PeriodicField> minimizers;  // kept when opts.keep_minimizer
  std::vector<EnvelopeResult> results;
};

/// Cell problems for n = 1, 2, 4, ..., n_max, each warm-started from the
/// replicated minimizer of the previous scale.
CellTrace fhom(const Operator& op, const Integrand& f, std::span<const double> x,
               std::span<const double> xi, int n_max, const EnvelopeOptions& opts);

enum class FieldClass { U, W, F };
const char* class_name(FieldClass c);

struct FieldClassReport {
  FieldClass cls = FieldClass::U;
  double mean_residual = 0.0;   // largest |int_Q w(x, y) dy| over macro nodes
  double ay_residual = 0.0;     // largest hneg(A_y(x) w(x, .)) over macro nodes
  double macro_residual = 0.0;  // hneg(A u) of the macro part
  double tol = 1e-7;
  bool pass = false;
};

/// U: macro field u with A u = 0.
FieldClassReport membership_check(const Operator& op, const PeriodicField& u, double tol = 1e-7);
/// W: mean-zero fluctuations with A_y w = 0; F: mean in U plus fluctuation in W.
FieldClassReport membership_check(const Operator& op, const TwoScaleField& v, FieldClass cls,
                                  double tol = 1e-7, Exec exec = Exec::parallel);

struct EhomResult {
  bool feasible = false;
  double value = 0.0;  // meaningful when feasible
  FieldClassReport membership;
  std::vector<double> nodal;  // f_hom(x_j, u(x_j))
  std::vector<int> n_list;
  std::vector<double> per_n;       // midpoint integral of the scale-n cell values
  std::vector<double> per_n_grad;  // largest final projected-gradient norm at scale n
};

/// int_Omega f_hom(x, u(x)) dx for u in U, Infeasible (feasible = false)
/// otherwise.
EhomResult ehom(const Operator& op, const Integrand& f, const PeriodicField& u, int n_max,
                const EnvelopeOptions& opts, double tol = 1e-7, Exec exec = Exec::parallel);

struct RelaxationRow {
  int k = 0;
  double energy = 0.0;    // midpoint integral of f(x, u_eps(x))
  double gap = 0.0;       // energy - envelope integral
  double residual = 0.0;  // hneg(A u_eps)
};

struct RelaxationReport {
  FieldClassReport membership;
  double envelope_integral = 0.0;
  std::vector<RelaxationRow> rows;
  /// Every energy >= envelope integral - lower_tol.
  bool lower_bound_ok = true;
  double lower_tol = 1e-6;
  std::vector<int> output_grid;
};

/// Compares int_Omega Q_A f(x, u(x)) dx with the energies of sequences
/// u_eps = u + w*(x, x/eps) built from nodewise envelope minimizers.
RelaxationReport relaxation_check(const Operator& op, const Integrand& f, const PeriodicField& u,
                                  const std::vector<int>& k_list, const Grid& output,
                                  const EnvelopeOptions& opts, double tol = 1e-7,
                                  Exec exec = Exec::parallel);

}  // namespace aqx
