#include "aqx/homogenize.hpp"

#include <algorithm>
#include <cmath>

#include "aqx/errors.hpp"
#include "aqx/projection.hpp"
#include "aqx/twoscale.hpp"

namespace aqx {

namespace {

bool power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

}  // namespace

PeriodicField replicate(const PeriodicField& w, int k) {
  const Grid& coarse = w.grid();
  const Grid fine = coarse.refined(k);
  const auto N = static_cast<std::size_t>(coarse.dim());
  PeriodicField out(fine, w.components());
  int J[3], I[3];
  for (std::size_t j = 0; j < fine.size(); ++j) {
    fine.multi_index(j, std::span<int>(J, N));
    for (std::size_t a = 0; a < N; ++a) {
      const int K = coarse.dims(static_cast<int>(a));
      // k y_fine = -k/2 + J/K, which is the coarse node J + K (1 - k) / 2 mod K.
      I[a] = ((J[a] + K * (1 - k) / 2) % K + K) % K;
    }
    const std::size_t i = coarse.flat_index(std::span<const int>(I, N));
    for (int c = 0; c < w.components(); ++c) out.at(j, c) = w.at(i, c);
  }
  return out;
}

EnvelopeResult cell_problem(const Operator& op, const Integrand& f, std::span<const double> x,
                            std::span<const double> xi, int n, const EnvelopeOptions& opts,
                            const PeriodicField* warm) {
  if (!power_of_two(n))
    throw ConfigError("GridIncompatible",
                      "homogenize/cell_problem: scale n = " + std::to_string(n) +
                          " is not a power of two");
  if (!f.depends_on_y()) return qa_envelope(op, f, x, xi, opts);

  const Grid base = opts.grid(op.N());
  std::vector<std::string> warnings;
  if (const auto band = f.y_bandwidth()) {
    int m = base.dims(0);
    for (int a = 1; a < base.dim(); ++a) m = std::min(m, base.dims(a));
    if (n * *band >= n * m / 2.0)
      throw ConfigError("UnresolvableIntegrand",
                        "homogenize/cell_problem: n times the y-frequency of f reaches the "
                        "Nyquist limit of the scaled micro grid");
  } else {
    warnings.push_back(
        "homogenize/cell_problem: y-dependence of f is not a trigonometric polynomial; "
        "resolution is not checked");
  }

  const Grid grid = base.refined(n);
  const PointProjector pp(op, x, grid);
  EnvelopeOptions local = opts;
  if (warm) local.warm_starts.push_back(*warm);
  const bool x_matters = depends_on_x(op) || f.depends_on_x();
  const auto seed = task_seed(opts.seed, static_cast<std::uint64_t>(n),
                              x_matters ? x : std::span<const double>{}, xi);
  auto res = minimize_cell(pp, f, xi, n, local, seed);
  res.warnings.insert(res.warnings.end(), warnings.begin(), warnings.end());
  return res;
}

CellTrace fhom(const Operator& op, const Integrand& f, std::span<const double> x,
               std::span<const double> xi, int n_max, const EnvelopeOptions& opts) {
  if (!power_of_two(n_max))
    throw ConfigError("GridIncompatible", "homogenize/fhom: n_max must be a power of two");
  CellTrace trace;
  EnvelopeOptions local = opts;
  local.keep_minimizer = true;
  std::optional<PeriodicField> warm;
  for (int n = 1; n <= n_max; n *= 2) {
    auto res = cell_problem(op, f, x, xi, n, local, warm ? &*warm : nullptr);
    if (f.depends_on_y()) warm = replicate(res.minimizer, 2);
    trace.n_list.push_back(n);
    trace.values.push_back(res.value);
    if (opts.keep_minimizer) trace.minimizers.push_back(res.minimizer);
    else res.minimizer = PeriodicField();
    trace.results.push_back(std::move(res));
  }
  trace.fhom_estimate = *std::min_element(trace.values.begin(), trace.values.end());
  return trace;
}

const char* class_name(FieldClass c) {
  switch (c) {
    case FieldClass::U: return "U";
    case FieldClass::W: return "W";
    case FieldClass::F: return "F";
  }
  return "?";
}

FieldClassReport membership_check(const Operator& op, const PeriodicField& u, double tol) {
  FieldClassReport r;
  r.cls = FieldClass::U;
  r.tol = tol;
  r.macro_residual = hneg_norm(apply_A_macro(op, u));
  r.pass = r.macro_residual <= tol;
  return r;
}

FieldClassReport membership_check(const Operator& op, const TwoScaleField& v, FieldClass cls,
                                  double tol, Exec exec) {
  if (cls == FieldClass::U)
    throw ConfigError("ShapeMismatch", "homogenize/membership_check: U expects a macro field");
  FieldClassReport r;
  r.cls = cls;
  r.tol = tol;
  const Grid& macro = v.macro();
  const auto N = static_cast<std::size_t>(macro.dim());
  const PeriodicField mean = v.cell_mean();
  std::vector<double> ay(macro.size());
  for_each_index(macro.size(), exec, [&](std::size_t j) {
    double x[3];
    macro.coords(j, std::span<double>(x, N));
    ay[j] = hneg_norm(apply_Ay(op, std::span<const double>(x, N), v.slice(j)));
  });
  r.ay_residual = *std::max_element(ay.begin(), ay.end());
  if (cls == FieldClass::W) {
    for (std::size_t j = 0; j < macro.size(); ++j) {
      double m2 = 0.0;
      for (int c = 0; c < v.components(); ++c) m2 += mean.at(j, c) * mean.at(j, c);
      r.mean_residual = std::max(r.mean_residual, std::sqrt(m2));
    }
  } else {
    r.macro_residual = hneg_norm(apply_A_macro(op, mean));
  }
  r.pass = r.mean_residual <= tol && r.ay_residual <= tol && r.macro_residual <= tol;
  return r;
}

EhomResult ehom(const Operator& op, const Integrand& f, const PeriodicField& u, int n_max,
                const EnvelopeOptions& opts, double tol, Exec exec) {
  EhomResult r;
  r.membership = membership_check(op, u, tol);
  if (!r.membership.pass) return r;
  r.feasible = true;
  const Grid& macro = u.grid();
  const auto N = static_cast<std::size_t>(macro.dim());
  const auto d = static_cast<std::size_t>(u.components());
  EnvelopeOptions local = opts;
  local.keep_minimizer = false;
  r.nodal.assign(macro.size(), 0.0);
  std::vector<CellTrace> traces(macro.size());
  for_each_index(macro.size(), exec, [&](std::size_t j) {
    double x[3];
    macro.coords(j, std::span<double>(x, N));
    std::vector<double> xi(d);
    for (std::size_t c = 0; c < d; ++c) xi[c] = u.at(j, static_cast<int>(c));
    traces[j] = fhom(op, f, std::span<const double>(x, N), xi, n_max, local);
    r.nodal[j] = traces[j].fhom_estimate;
  });
  double s = 0.0;
  for (double v : r.nodal) s += v;
  r.value = s / static_cast<double>(macro.size());
  r.n_list = traces.front().n_list;
  r.per_n.assign(r.n_list.size(), 0.0);
  r.per_n_grad.assign(r.n_list.size(), 0.0);
  for (const auto& t : traces)
    for (std::size_t i = 0; i < r.n_list.size(); ++i) {
      r.per_n[i] += t.values[i] / static_cast<double>(macro.size());
      r.per_n_grad[i] = std::max(r.per_n_grad[i], t.results[i].grad_norm);
    }
  return r;
}

RelaxationReport relaxation_check(const Operator& op, const Integrand& f, const PeriodicField& u,
                                  const std::vector<int>& k_list, const Grid& output,
                                  const EnvelopeOptions& opts, double tol, Exec exec) {
  RelaxationReport rep;
  rep.membership = membership_check(op, u, tol);
  if (!rep.membership.pass)
    throw ConfigError("NotInU", "homogenize/relaxation_check: u is not A-free");
  rep.output_grid = output.dims();

  EnvelopeOptions local = opts;
  local.keep_minimizer = true;
  const auto env = pointwise_envelope_field(op, f, u, local, exec);
  double s = 0.0;
  for (double v : env.values.values()) s += v;
  rep.envelope_integral = s / static_cast<double>(u.nodes());

  const Grid micro = local.grid(op.N());
  TwoScaleField v(u.grid(), micro, u.components());
  for (std::size_t j = 0; j < u.nodes(); ++j) {
    PeriodicField w = env.nodes[j].minimizer;
    for (std::size_t i = 0; i < w.nodes(); ++i)
      for (int c = 0; c < u.components(); ++c) w.at(i, c) += u.at(j, c);
    v.set_slice(j, w);
  }
  const auto bundle = generate_sequence(op, v, k_list, output, tol, exec);

  const auto N = static_cast<std::size_t>(output.dim());
  for (std::size_t e = 0; e < k_list.size(); ++e) {
    const PeriodicField& ue = bundle.fields[e];
    std::vector<double> vals(output.size());
    for_each_index(output.size(), exec, [&](std::size_t node) {
      double x[3];
      output.coords(node, std::span<double>(x, N));
      std::vector<double> xi(ue.values().begin() + static_cast<std::ptrdiff_t>(node * ue.components()),
                             ue.values().begin() + static_cast<std::ptrdiff_t>((node + 1) * ue.components()));
      vals[node] = f.value(std::span<const double>(x, N), {}, xi);
    });
    double e_sum = 0.0;
    for (double v2 : vals) e_sum += v2;
    RelaxationRow row;
    row.k = k_list[e];
    row.energy = e_sum / static_cast<double>(output.size());
    row.gap = row.energy - rep.envelope_integral;
    row.residual = hneg_norm(apply_A_macro(op, ue));
    rep.lower_bound_ok = rep.lower_bound_ok && row.energy >= rep.envelope_integral - rep.lower_tol;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace aqx
