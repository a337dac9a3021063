#pragma once

#include <span>
#include <string>

#include "aqx/exec.hpp"
#include "aqx/operator.hpp"
#include "aqx/twoscale_field.hpp"

namespace aqx {

/// Pi(x) psi: spectrum P(x, lambda) psi^(lambda) for lambda != 0, zero mode
/// and Nyquist slots dropped.
PeriodicField project(const PointProjector& pp, const PeriodicField& psi);
PeriodicField project(const Operator& op, std::span<const double> x, const PeriodicField& psi);
/// Same multiplier applied to a spectrum in place.
void project_spectrum(const PointProjector& pp, Spectrum& spectrum);

/// C(x) = max over the grid's lattice directions of the operator norm of
/// Q(x, lambda / |lambda|).
double deficiency_bound(const PointProjector& pp);
double deficiency_bound(const Operator& op, std::span<const double> x, const Grid& grid);

/// Converts C(x) into the constant for
///   |psi - Pi psi|_2 <= C_eff * hneg(A_y psi)
/// on mean-zero fields: C_eff = C * sqrt(1 + 4 pi^2) / (2 pi), the worst
/// ratio between |lambda|^-1 and the H^-1 multiplier at |lambda| >= 1.
double effective_constant(double deficiency);

struct ProjectionReport {
  double input_mean = 0.0;       // Euclidean norm of the cell average of psi
  double residual = 0.0;         // hneg(A_y Pi psi)
  double idempotency_gap = 0.0;  // |Pi Pi psi - Pi psi|_2
  double deficiency = 0.0;       // C(x)
  double effective = 0.0;        // C_eff
  double defect_lhs = 0.0;       // |psi0 - Pi psi0|_2 with psi0 = psi - mean
  double defect_rhs = 0.0;       // C_eff * hneg(A_y psi0)
  double p = 2.0;
  /// "certified" at p = 2, "indicative" otherwise.
  std::string bound_status;
  int rank = 0;
};

ProjectionReport projection_report(const PointProjector& pp, const PeriodicField& psi,
                                   double p = 2.0);

/// Applies Pi(x_j) to w(x_j, .) at every macro node.
TwoScaleField project_two_scale(const Operator& op, const TwoScaleField& w,
                                Exec exec = Exec::parallel);

}  // namespace aqx
