#include "aqx/envelope.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "aqx/errors.hpp"
#include "aqx/projection.hpp"

namespace aqx {

namespace {

constexpr double kArmijoSlope = 1e-4;
constexpr double kShrink = 0.5;
constexpr double kMinStep = 1e-12;
constexpr double kSigmas[3] = {0.5, 1.0, 2.0};

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) { return splitmix(h ^ splitmix(v)); }

// Cell average of f(x, s y, xi + w(y)) and its xi-gradient field.
class CellObjective {
 public:
  CellObjective(const PointProjector& pp, const Integrand& f, std::span<const double> xi,
                int y_scale)
      : pp_(pp), f_(f), xi_(xi.begin(), xi.end()), count_(pp.grid().size()) {
    const Grid& grid = pp.grid();
    const auto N = static_cast<std::size_t>(grid.dim());
    if (y_scale > 0) {
      y_.resize(count_ * N);
      for (std::size_t node = 0; node < count_; ++node) {
        grid.coords(node, std::span<double>(y_.data() + node * N, N));
        for (std::size_t a = 0; a < N; ++a) {
          double t = y_scale * y_[node * N + a];
          y_[node * N + a] = t - std::floor(t + 0.5);
        }
      }
    }
    buf_.resize(count_ * xi_.size());
    vals_.resize(count_);
  }

  double value(const PeriodicField& w) {
    fill(w);
    f_.values(pp_.frozen().x(), y_.empty() ? nullptr : y_.data(), buf_.data(), count_,
              vals_.data());
    double s = 0.0;
    for (double v : vals_) s += v;
    return s / static_cast<double>(count_);
  }

  PeriodicField projected_gradient(const PeriodicField& w) {
    fill(w);
    PeriodicField g(pp_.grid(), static_cast<int>(xi_.size()));
    f_.gradients(pp_.frozen().x(), y_.empty() ? nullptr : y_.data(), buf_.data(), count_,
                 g.values().data());
    return project(pp_, g);
  }

 private:
  void fill(const PeriodicField& w) {
    const std::size_t d = xi_.size();
    const auto v = w.values();
    for (std::size_t node = 0; node < count_; ++node)
      for (std::size_t k = 0; k < d; ++k) buf_[node * d + k] = xi_[k] + v[node * d + k];
  }

  const PointProjector& pp_;
  const Integrand& f_;
  std::vector<double> xi_;
  std::size_t count_;
  std::vector<double> y_;
  std::vector<double> buf_;
  std::vector<double> vals_;
};

PeriodicField random_start(const PointProjector& pp, int d, double sigma, std::uint64_t seed) {
  const Grid& grid = pp.grid();
  const auto N = static_cast<std::size_t>(grid.dim());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Spectrum spec(grid, d);
  int f[3];
  int neg[3];
  for (std::size_t slot = 1; slot < grid.size(); ++slot) {
    if (grid.is_nyquist(slot)) continue;
    grid.frequency(slot, std::span<int>(f, N));
    int sign = 0;
    for (std::size_t a = 0; a < N && sign == 0; ++a) sign = f[a] > 0 ? 1 : f[a] < 0 ? -1 : 0;
    if (sign < 0) continue;
    for (std::size_t a = 0; a < N; ++a) neg[a] = -f[a];
    const std::size_t partner = grid.slot_of(std::span<const int>(neg, N));
    const double scale = sigma / (1.0 + grid.frequency_norm2(slot)) / std::sqrt(2.0);
    for (int c = 0; c < d; ++c) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      spec.at(slot, c) = scale * Complex(re, im);
      spec.at(partner, c) = std::conj(spec.at(slot, c));
    }
  }
  project_spectrum(pp, spec);
  return inverse_transform(spec);
}

struct Descent {
  PeriodicField w;
  double value = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
};

Descent descend(CellObjective& obj, const PointProjector& pp, PeriodicField w0,
                const EnvelopeOptions& opts) {
  Descent out;
  out.w = remove_mean(project(pp, w0));
  double F = obj.value(out.w);
  if (!std::isfinite(F))
    throw NumericalError("NonFiniteValue", "envelope/qa_envelope: integrand is not finite at a start");
  PeriodicField g = obj.projected_gradient(out.w);
  double gn = lp_norm(g, 2.0);
  const double stop = opts.tol * (1.0 + (std::isfinite(gn) ? gn : 0.0));
  double last_step = 1.0;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    if (gn <= stop) {
      out.converged = true;
      break;
    }
    double step = std::min(1.0, 2.0 * last_step);
    bool accepted = false;
    PeriodicField trial;
    double Ft = 0.0;
    while (step >= kMinStep) {
      trial = out.w;
      trial.axpy(-step, g);
      Ft = obj.value(trial);
      if (std::isfinite(Ft) && Ft <= F - kArmijoSlope * step * gn * gn) {
        accepted = true;
        break;
      }
      step *= kShrink;
    }
    if (!accepted) {
      if (it == 0)
        throw NumericalError("NoDescent",
                             "envelope/qa_envelope: Armijo backtracking failed on the first "
                             "iteration (non-finite or inconsistent gradient)");
      break;
    }
    out.w = remove_mean(std::move(trial));
    F = Ft;
    last_step = step;
    g = obj.projected_gradient(out.w);
    gn = lp_norm(g, 2.0);
  }
  if (!out.converged && gn <= stop) out.converged = true;
  out.value = obj.value(out.w);
  out.iterations = it;
  out.grad_norm = gn;
  return out;
}

}  // namespace

Grid EnvelopeOptions::grid(int N) const {
  if (micro.empty()) return Grid::cube(N, 64, Domain::cell);
  if (static_cast<int>(micro.size()) == 1) return Grid::cube(N, micro.front(), Domain::cell);
  if (static_cast<int>(micro.size()) != N)
    throw ConfigError("InvalidGrid", "envelope: micro grid has the wrong number of axes");
  return Grid(micro, Domain::cell);
}

std::uint64_t task_seed(std::uint64_t master, std::uint64_t tag, std::span<const double> x,
                        std::span<const double> xi) {
  std::uint64_t h = mix(splitmix(master), tag);
  h = mix(h, x.size());
  for (double v : x) h = mix(h, std::bit_cast<std::uint64_t>(v));
  h = mix(h, xi.size());
  for (double v : xi) h = mix(h, std::bit_cast<std::uint64_t>(v));
  return h;
}

bool depends_on_x(const Operator& op) {
  for (const auto& m : op.spec().coeffs)
    for (const auto& e : m)
      if (e.depends_on(expr::VarKind::x)) return true;
  return false;
}

std::uint64_t envelope_seed(const Operator& op, const Integrand& f, std::uint64_t master,
                            std::span<const double> x, std::span<const double> xi) {
  const bool x_matters = depends_on_x(op) || f.depends_on_x();
  return task_seed(master, 0, x_matters ? x : std::span<const double>{}, xi);
}

EnvelopeResult minimize_cell(const PointProjector& pp, const Integrand& f,
                             std::span<const double> xi, int y_scale,
                             const EnvelopeOptions& opts, std::uint64_t seed) {
  const int d = pp.frozen().d();
  if (static_cast<int>(xi.size()) != d || f.d() != d)
    throw ConfigError("ShapeMismatch", "envelope: xi must have d components");
  if (y_scale == 0 && f.depends_on_y())
    throw ConfigError("IntegrandDependsOnY",
                      "envelope/qa_envelope: integrand depends on y; use the cell problem");

  CellObjective obj(pp, f, xi, y_scale);
  EnvelopeResult res;
  res.grid = pp.grid().dims();
  if (!f.gradient_warning().empty()) res.warnings.push_back(f.gradient_warning());
  const PeriodicField zero(pp.grid(), d);
  res.baseline = obj.value(zero);

  struct Start {
    std::string kind;
    int index;
    double sigma;
  };
  std::vector<Start> plan;
  plan.push_back({"zero", 0, 0.0});
  for (std::size_t k = 0; k < opts.warm_starts.size(); ++k)
    plan.push_back({"warm", static_cast<int>(k), 0.0});
  for (int k = 0; k < opts.random_starts; ++k) plan.push_back({"random", k, kSigmas[k % 3]});

  bool have_best = false;
  for (const auto& s : plan) {
    PeriodicField w0 = zero;
    if (s.kind == "warm") {
      w0 = opts.warm_starts[static_cast<std::size_t>(s.index)];
      if (!(w0.grid() == pp.grid()) || w0.components() != d)
        throw ConfigError("ShapeMismatch", "envelope: warm start has the wrong shape");
    } else if (s.kind == "random") {
      w0 = random_start(pp, d, s.sigma, mix(seed, static_cast<std::uint64_t>(s.index) + 1));
    }
    Descent r = descend(obj, pp, std::move(w0), opts);
    res.starts.push_back({s.kind, s.index, s.sigma, r.value, r.iterations, r.grad_norm, r.converged});
    if (!have_best || r.value < res.value) {
      have_best = true;
      res.value = r.value;
      res.iterations = r.iterations;
      res.grad_norm = r.grad_norm;
      if (opts.keep_minimizer) res.minimizer = std::move(r.w);
    }
  }
  return res;
}

EnvelopeResult qa_envelope(const Operator& op, const Integrand& f, std::span<const double> x,
                           std::span<const double> xi, const EnvelopeOptions& opts) {
  if (static_cast<int>(x.size()) != op.N())
    throw ConfigError("ShapeMismatch", "envelope/qa_envelope: x must have N entries");
  const PointProjector pp(op, x, opts.grid(op.N()));
  return minimize_cell(pp, f, xi, 0, opts, envelope_seed(op, f, opts.seed, x, xi));
}

EnvelopeField pointwise_envelope_field(const Operator& op, const Integrand& f,
                                       const PeriodicField& u, const EnvelopeOptions& opts,
                                       Exec exec) {
  const Grid& macro = u.grid();
  if (macro.dim() != op.N() || u.components() != op.d())
    throw ConfigError("ShapeMismatch", "envelope/pointwise_envelope_field: field shape mismatch");
  EnvelopeField out{PeriodicField(macro, 1), std::vector<EnvelopeResult>(macro.size())};
  const auto N = static_cast<std::size_t>(macro.dim());
  const auto d = static_cast<std::size_t>(op.d());
  auto xi_at = [&](std::size_t j) {
    std::vector<double> xi(d);
    for (std::size_t c = 0; c < d; ++c) xi[c] = u.at(j, static_cast<int>(c));
    return xi;
  };

  // Without x-dependence, nodes sharing u(x_j) pose the same frozen problem
  // with the same seed, so one solve serves all of them.
  std::vector<std::size_t> task_node;
  std::vector<std::size_t> node_task(macro.size());
  if (!depends_on_x(op) && !f.depends_on_x()) {
    std::map<std::vector<double>, std::size_t> seen;
    for (std::size_t j = 0; j < macro.size(); ++j) {
      auto [it, fresh] = seen.emplace(xi_at(j), task_node.size());
      if (fresh) task_node.push_back(j);
      node_task[j] = it->second;
    }
  } else {
    task_node.resize(macro.size());
    for (std::size_t j = 0; j < macro.size(); ++j) task_node[j] = node_task[j] = j;
  }

  std::vector<EnvelopeResult> solved(task_node.size());
  for_each_index(task_node.size(), exec, [&](std::size_t t) {
    double x[3];
    macro.coords(task_node[t], std::span<double>(x, N));
    solved[t] = qa_envelope(op, f, std::span<const double>(x, N), xi_at(task_node[t]), opts);
  });
  for (std::size_t j = 0; j < macro.size(); ++j) {
    out.nodes[j] = solved[node_task[j]];
    out.values.at(j, 0) = out.nodes[j].value;
  }
  return out;
}

}  // namespace aqx
