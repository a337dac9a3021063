#include "aqx/projection.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <numbers>

#include "aqx/errors.hpp"

namespace aqx {

void project_spectrum(const PointProjector& pp, Spectrum& spectrum) {
  const Grid& grid = spectrum.grid();
  const int d = spectrum.components();
  if (!(grid == pp.grid()) || d != pp.frozen().d())
    throw ConfigError("ShapeMismatch", "projection/project: field shape does not match projector");
  Complex tmp[64];
  for (std::size_t slot = 0; slot < grid.size(); ++slot) {
    if (!pp.active(slot)) {
      for (int c = 0; c < d; ++c) spectrum.at(slot, c) = Complex{};
      continue;
    }
    const Matrix& P = pp.P(slot);
    for (int r = 0; r < d; ++r) {
      Complex acc{};
      for (int c = 0; c < d; ++c) acc += P(r, c) * spectrum.at(slot, c);
      tmp[r] = acc;
    }
    for (int r = 0; r < d; ++r) spectrum.at(slot, r) = tmp[r];
  }
}

PeriodicField project(const PointProjector& pp, const PeriodicField& psi) {
  auto spec = forward_transform(psi);
  project_spectrum(pp, spec);
  return inverse_transform(spec);
}

PeriodicField project(const Operator& op, std::span<const double> x, const PeriodicField& psi) {
  return project(PointProjector(op, x, psi.grid()), psi);
}

double deficiency_bound(const PointProjector& pp) {
  const Grid& grid = pp.grid();
  double worst = 0.0;
  for (std::size_t slot = 0; slot < grid.size(); ++slot) {
    if (!pp.active(slot)) continue;
    const Matrix& Q = pp.Q(slot);
    if (Q.size() == 0) continue;
    Eigen::JacobiSVD<Matrix> svd(Q);
    worst = std::max(worst, svd.singularValues()(0) * std::sqrt(grid.frequency_norm2(slot)));
  }
  return worst;
}

double deficiency_bound(const Operator& op, std::span<const double> x, const Grid& grid) {
  return deficiency_bound(PointProjector(op, x, grid));
}

double effective_constant(double deficiency) {
  const double two_pi = 2.0 * std::numbers::pi;
  return deficiency * std::sqrt(1.0 + two_pi * two_pi) / two_pi;
}

ProjectionReport projection_report(const PointProjector& pp, const PeriodicField& psi, double p) {
  ProjectionReport r;
  r.p = p;
  r.rank = pp.rank();
  r.bound_status = p == 2.0 ? "certified" : "indicative";
  double m2 = 0.0;
  for (double v : psi.mean()) m2 += v * v;
  r.input_mean = std::sqrt(m2);

  const auto proj = project(pp, psi);
  r.residual = hneg_norm(apply_Ay(pp.frozen(), proj));
  r.idempotency_gap = lp_norm(project(pp, proj) - proj, 2.0);
  r.deficiency = deficiency_bound(pp);
  r.effective = effective_constant(r.deficiency);

  const auto centered = remove_mean(psi);
  r.defect_lhs = lp_norm(centered - project(pp, centered), p);
  r.defect_rhs = r.effective * hneg_norm(apply_Ay(pp.frozen(), centered));
  return r;
}

TwoScaleField project_two_scale(const Operator& op, const TwoScaleField& w, Exec exec) {
  TwoScaleField out(w.macro(), w.micro(), w.components());
  const auto N = static_cast<std::size_t>(w.macro().dim());
  for_each_index(w.macro().size(), exec, [&](std::size_t j) {
    double x[3];
    w.macro().coords(j, std::span<double>(x, N));
    const PointProjector pp(op, std::span<const double>(x, N), w.micro());
    out.set_slice(j, project(pp, w.slice(j)));
  });
  return out;
}

}  // namespace aqx
