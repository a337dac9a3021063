#include "aqx/twoscale.hpp"

#include <cmath>
#include <numbers>

#include "aqx/errors.hpp"
#include "aqx/homogenize.hpp"
#include "aqx/projection.hpp"

namespace aqx {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string dims_text(const Grid& g) {
  std::string s;
  for (int a = 0; a < g.dim(); ++a) s += (a ? "x" : "") + std::to_string(g.dims(a));
  return s;
}

double reduce_cell(double t) { return t - std::floor(t + 0.5); }

// All lattice vectors with |v| <= radius, canonical sign first nonzero > 0.
std::vector<std::vector<int>> half_lattice(int N, int radius) {
  std::vector<std::vector<int>> out;
  std::vector<int> v(static_cast<std::size_t>(N), -radius);
  for (;;) {
    int n2 = 0;
    int sign = 0;
    for (int c : v) {
      n2 += c * c;
      if (sign == 0) sign = c > 0 ? 1 : c < 0 ? -1 : 0;
    }
    if (n2 <= radius * radius && sign >= 0) out.push_back(v);
    int a = N - 1;
    while (a >= 0 && v[static_cast<std::size_t>(a)] == radius) v[static_cast<std::size_t>(a--)] = -radius;
    if (a < 0) break;
    ++v[static_cast<std::size_t>(a)];
  }
  return out;
}

double mode(std::span<const int> freq, bool use_sin, std::span<const double> pt) {
  double arg = 0.0;
  for (std::size_t a = 0; a < freq.size(); ++a) arg += freq[a] * pt[a];
  arg *= kTwoPi;
  return use_sin ? std::sin(arg) : std::cos(arg);
}

}  // namespace

void check_epsilon(const Grid& macro, int k, int micro) {
  for (int a = 0; a < macro.dim(); ++a) {
    const int M = macro.dims(a);
    if (k < 1 || M % k != 0)
      throw ConfigError("IncompatibleEpsilon", "twoscale/unfold: 1/eps = " + std::to_string(k) +
                                                   " does not divide the macro grid size " +
                                                   std::to_string(M));
    if (micro > 0 && (M / k) % micro != 0)
      throw ConfigError("IncompatibleEpsilon",
                        "twoscale/unfold: micro grid " + std::to_string(micro) +
                            " does not divide the cell width " + std::to_string(M / k));
  }
}

TwoScaleField unfold(const PeriodicField& u, int k, int micro) {
  const Grid& macro = u.grid();
  check_epsilon(macro, k, micro);
  const auto N = static_cast<std::size_t>(macro.dim());
  std::vector<int> mdims(N);
  std::vector<int> width(N);
  for (std::size_t a = 0; a < N; ++a) {
    width[a] = macro.dims(static_cast<int>(a)) / k;
    mdims[a] = micro > 0 ? micro : width[a];
  }
  TwoScaleField out(macro, Grid(mdims, Domain::cell), u.components());
  const Grid& mg = out.micro();
  int J[3], I[3], T[3];
  for (std::size_t j = 0; j < macro.size(); ++j) {
    macro.multi_index(j, std::span<int>(J, N));
    for (std::size_t i = 0; i < mg.size(); ++i) {
      mg.multi_index(i, std::span<int>(I, N));
      for (std::size_t a = 0; a < N; ++a) {
        const int m = mdims[a];
        T[a] = (J[a] / width[a]) * width[a] + ((I[a] + m / 2) % m) * (width[a] / m);
      }
      const std::size_t t = macro.flat_index(std::span<const int>(T, N));
      for (int c = 0; c < u.components(); ++c) out.at(j, i, c) = u.at(t, c);
    }
  }
  return out;
}

double unfold_point(const std::function<double(std::span<const double>)>& u, double eps,
                    std::span<const double> x, std::span<const double> y) {
  std::vector<double> p(x.size());
  for (std::size_t a = 0; a < x.size(); ++a) {
    p[a] = eps * std::floor(x[a] / eps) + eps * (y[a] - std::floor(y[a]));
    if (p[a] < 0.0 || p[a] >= 1.0) return 0.0;
  }
  return u(p);
}

std::vector<double> unfold_convergence(const PeriodicField& u, const std::vector<int>& k_list,
                                       int micro) {
  std::vector<double> out;
  for (int k : k_list) {
    const auto T = unfold(u, k, micro);
    double s = 0.0;
    const std::size_t ms = T.micro().size();
    for (std::size_t j = 0; j < T.macro().size(); ++j)
      for (std::size_t i = 0; i < ms; ++i)
        for (int c = 0; c < u.components(); ++c) {
          const double diff = u.at(j, c) - T.at(j, i, c);
          s += diff * diff;
        }
    out.push_back(std::sqrt(s / static_cast<double>(T.macro().size() * ms)));
  }
  return out;
}

SequenceBundle generate_sequence(const Operator& op, const TwoScaleField& v,
                                 const std::vector<int>& k_list, std::optional<Grid> output,
                                 double membership_tol, Exec exec) {
  const auto report = membership_check(op, v, FieldClass::F, membership_tol);
  if (!report.pass)
    throw ConfigError("NotAFreeField",
                      "twoscale/generate_sequence: the two-scale limit is not A-free (residual " +
                          std::to_string(std::max(report.ay_residual, report.macro_residual)) + ")");
  const Grid& macro = v.macro();
  const Grid out = output.value_or(macro);
  if (out.domain() != Domain::macro || out.dim() != macro.dim())
    throw ConfigError("InvalidGrid", "twoscale/generate_sequence: output must be a macro grid");
  const auto N = static_cast<std::size_t>(macro.dim());
  std::vector<int> ratio(N);
  for (std::size_t a = 0; a < N; ++a) {
    const int M = macro.dims(static_cast<int>(a));
    const int O = out.dims(static_cast<int>(a));
    if (O % M != 0)
      throw ConfigError("InvalidGrid",
                        "twoscale/generate_sequence: output grid must refine the macro grid");
    ratio[a] = O / M;
  }
  for (int k : k_list) check_epsilon(out, k, 0);
  for (std::size_t i = 1; i < k_list.size(); ++i)
    if (k_list[i] <= k_list[i - 1])
      throw ConfigError("InvalidEpsilon", "twoscale/generate_sequence: eps list must decrease");

  const int d = v.components();
  const PeriodicField mean = v.cell_mean();
  const PeriodicField mean_out =
      out == macro ? mean : inverse_transform(resample_spectrum(forward_transform(mean), out));

  std::vector<Spectrum> fluct(macro.size());
  for_each_index(macro.size(), exec, [&](std::size_t j) {
    double x[3];
    macro.coords(j, std::span<double>(x, N));
    PeriodicField w = v.slice(j);
    for (std::size_t i = 0; i < w.nodes(); ++i)
      for (int c = 0; c < d; ++c) w.at(i, c) -= mean.at(j, c);
    auto spec = forward_transform(w);
    project_spectrum(PointProjector(op, std::span<const double>(x, N), v.micro()), spec);
    fluct[j] = std::move(spec);
  });

  SequenceBundle bundle;
  bundle.k_list = k_list;
  bundle.provenance["generator"] = "mean plus projected fluctuation sampled at (x, x/eps)";
  bundle.provenance["macro_grid"] = dims_text(macro);
  bundle.provenance["micro_grid"] = dims_text(v.micro());
  bundle.provenance["output_grid"] = dims_text(out);
  bundle.provenance["operator"] = op.spec().name;

  for (int k : k_list) {
    PeriodicField u(out, d);
    for_each_index(out.size(), exec, [&](std::size_t node) {
      double x[3], y[3], val[64];
      int idx[3];
      out.coords(node, std::span<double>(x, N));
      out.multi_index(node, std::span<int>(idx, N));
      for (std::size_t a = 0; a < N; ++a) y[a] = reduce_cell(k * x[a]);
      bool on_macro = true;
      for (std::size_t a = 0; a < N; ++a) on_macro = on_macro && idx[a] % ratio[a] == 0;
      if (on_macro) {
        int J[3];
        for (std::size_t a = 0; a < N; ++a) J[a] = idx[a] / ratio[a];
        trig_interpolate(fluct[macro.flat_index(std::span<const int>(J, N))],
                         std::span<const double>(y, N), std::span<double>(val, static_cast<std::size_t>(d)));
      } else {
        Spectrum mix(v.micro(), d);
        for (int corner = 0; corner < (1 << N); ++corner) {
          double weight = 1.0;
          int J[3];
          for (std::size_t a = 0; a < N; ++a) {
            const int base = idx[a] / ratio[a];
            const double t = static_cast<double>(idx[a] % ratio[a]) / ratio[a];
            const int bit = (corner >> a) & 1;
            J[a] = (base + bit) % macro.dims(static_cast<int>(a));
            weight *= bit ? t : 1.0 - t;
          }
          if (weight == 0.0) continue;
          const auto& s = fluct[macro.flat_index(std::span<const int>(J, N))];
          for (std::size_t q = 0; q < s.coeffs().size(); ++q) mix.coeffs()[q] += weight * s.coeffs()[q];
        }
        trig_interpolate(mix, std::span<const double>(y, N),
                         std::span<double>(val, static_cast<std::size_t>(d)));
      }
      for (int c = 0; c < d; ++c) u.at(node, c) = mean_out.at(node, c) + val[c];
    });
    bundle.fields.push_back(std::move(u));
  }
  return bundle;
}

double TestFunction::x_part(std::span<const double> x) const { return mode(mu, mu_sin, x); }
double TestFunction::y_part(std::span<const double> y) const { return mode(lambda, lambda_sin, y); }

std::vector<TestFunction> default_test_bank(int N, int d, int radius) {
  const auto modes = half_lattice(N, radius);
  std::vector<std::pair<std::vector<int>, bool>> real_modes;
  for (const auto& m : modes) {
    bool zero = true;
    for (int c : m) zero = zero && c == 0;
    real_modes.emplace_back(m, false);
    if (!zero) real_modes.emplace_back(m, true);
  }
  std::vector<TestFunction> bank;
  for (const auto& [mu, ms] : real_modes)
    for (const auto& [la, ls] : real_modes)
      for (int c = 0; c < d; ++c) bank.push_back(TestFunction{mu, ms, la, ls, c});
  return bank;
}

double twoscale_pairing(const PeriodicField& u_eps, const TwoScaleField& phi, int k) {
  const Grid& g = u_eps.grid();
  if (!(phi.macro() == g) || phi.components() != u_eps.components())
    throw ConfigError("ShapeMismatch", "twoscale/pairing: test field grid does not match");
  const auto N = static_cast<std::size_t>(g.dim());
  const auto d = static_cast<std::size_t>(u_eps.components());
  double s = 0.0;
  std::vector<double> val(d);
  for (std::size_t j = 0; j < g.size(); ++j) {
    double x[3], y[3];
    g.coords(j, std::span<double>(x, N));
    for (std::size_t a = 0; a < N; ++a) y[a] = reduce_cell(k * x[a]);
    trig_interpolate(forward_transform(phi.slice(j)), std::span<const double>(y, N), val);
    for (std::size_t c = 0; c < d; ++c) s += u_eps.at(j, static_cast<int>(c)) * val[c];
  }
  return s / static_cast<double>(g.size());
}

double twoscale_pairing(const PeriodicField& u_eps, const TestFunction& phi, int k) {
  const Grid& g = u_eps.grid();
  const auto N = static_cast<std::size_t>(g.dim());
  double s = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    double x[3], y[3];
    g.coords(j, std::span<double>(x, N));
    for (std::size_t a = 0; a < N; ++a) y[a] = reduce_cell(k * x[a]);
    s += u_eps.at(j, phi.component) * phi.x_part(std::span<const double>(x, N)) *
         phi.y_part(std::span<const double>(y, N));
  }
  return s / static_cast<double>(g.size());
}

double limit_pairing(const TwoScaleField& v, const TestFunction& phi) {
  const auto N = static_cast<std::size_t>(v.macro().dim());
  std::vector<double> ys(v.micro().size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    double y[3];
    v.micro().coords(i, std::span<double>(y, N));
    ys[i] = phi.y_part(std::span<const double>(y, N));
  }
  double s = 0.0;
  for (std::size_t j = 0; j < v.macro().size(); ++j) {
    double x[3];
    v.macro().coords(j, std::span<double>(x, N));
    double inner = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) inner += v.at(j, i, phi.component) * ys[i];
    s += phi.x_part(std::span<const double>(x, N)) * inner;
  }
  return s / static_cast<double>(v.macro().size() * v.micro().size());
}

std::vector<ResidualRow> twoscale_residual(const SequenceBundle& bundle, const TwoScaleField& v,
                                           const std::vector<TestFunction>& bank, Exec exec) {
  std::vector<double> limits(bank.size());
  for_each_index(bank.size(), exec, [&](std::size_t b) { limits[b] = limit_pairing(v, bank[b]); });

  std::vector<ResidualRow> rows(bundle.k_list.size());
  for (std::size_t e = 0; e < rows.size(); ++e) {
    const int k = bundle.k_list[e];
    const PeriodicField& u = bundle.fields[e];
    std::vector<double> gaps(bank.size());
    for_each_index(bank.size(), exec, [&](std::size_t b) {
      gaps[b] = std::abs(twoscale_pairing(u, bank[b], k) - limits[b]);
    });
    rows[e].k = k;
    for (double g : gaps) rows[e].weak_gap = std::max(rows[e].weak_gap, g);

    bool aligned = u.grid() == v.macro();
    const int m = v.micro().dims(0);
    for (int a = 0; a < v.micro().dim(); ++a) aligned = aligned && v.micro().dims(a) == m;
    for (int a = 0; aligned && a < u.grid().dim(); ++a)
      aligned = (u.grid().dims(a) % k == 0) && ((u.grid().dims(a) / k) % m == 0);
    if (!aligned) continue;
    const auto T = unfold(u, k, m);
    double s = 0.0;
    const auto vals = v.values();
    const auto tv = T.values();
    for (std::size_t i = 0; i < vals.size(); ++i) s += (tv[i] - vals[i]) * (tv[i] - vals[i]);
    rows[e].strong_gap = std::sqrt(s / static_cast<double>(v.macro().size() * v.micro().size()));
  }
  return rows;
}

}  // namespace aqx
