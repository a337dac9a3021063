#include "aqx/commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "aqx/config.hpp"
#include "aqx/errors.hpp"
#include "aqx/field_io.hpp"
#include "aqx/homogenize.hpp"
#include "aqx/projection.hpp"
#include "aqx/report.hpp"
#include "aqx/twoscale.hpp"
#include "aqx/verify.hpp"

namespace aqx {

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::string in;
  std::string x;
  std::string xi;
  std::string sweep;
  std::string minimizer;
  std::string csv;
  std::string report;
  std::string u;
  std::string u_expr;
  std::string mode = "unfold";
  std::string eps;
  std::string output_grid;
  std::string field_out;
  std::string only;
  int micro = 0;
  int n_max = 0;
  int threads = 0;
  std::optional<std::uint64_t> seed;
  double tol_scale = 1.0;
};

RunConfig load(const Flags& f) {
  RunConfig cfg = load_config(f.config);
  if (f.seed) cfg.seed = *f.seed;
  return cfg;
}

std::vector<double> point(const std::string& text, int n, const char* what) {
  if (text.empty()) return std::vector<double>(static_cast<std::size_t>(n), 0.0);
  auto v = parse_vector(text);
  if (static_cast<int>(v.size()) != n)
    throw ConfigError("InvalidArgument", std::string("cli: --") + what + " needs " +
                                             std::to_string(n) + " comma separated values");
  return v;
}

std::vector<int> grid_arg(const std::string& text) {
  std::vector<int> dims;
  for (double v : parse_vector(text)) {
    if (v != std::floor(v) || v < 4)
      throw ConfigError("InvalidArgument", "cli: grid sizes must be integers >= 4");
    dims.push_back(static_cast<int>(v));
  }
  return dims;
}

Json config_json(const RunConfig& c) {
  Json j;
  j["operator"] = {{"name", c.op.name}, {"N", c.op.N}, {"d", c.op.d}, {"l", c.op.l}};
  j["integrand"] = c.integrand;
  j["p"] = c.p;
  j["C"] = c.C;
  j["macro_grid"] = c.macro;
  j["micro_grid"] = c.micro;
  j["random_starts"] = c.random_starts;
  j["max_iter"] = c.max_iter;
  j["tol"] = c.tol;
  j["n_max"] = c.n_max;
  j["membership_tol"] = c.membership_tol;
  j["seed"] = c.seed;
  return j;
}

std::string eps_text(int k) { return "1/" + std::to_string(k); }

void emit(std::ostream& out, const std::string& path, const std::string& command, const Json& body) {
  write_report(path, report_header(command), body);
  out << "report: " << path << "\n";
}

// Macro field from --u (AQXF) or --u-expr ("e1; e2; ...", expressions in x).
PeriodicField macro_field(const Flags& f, const RunConfig& cfg) {
  if (!f.u.empty()) {
    auto u = load_field(f.u, Domain::macro);
    if (u.grid().dim() != cfg.op.N || u.components() != cfg.op.d)
      throw ConfigError("ShapeMismatch", "cli: field " + f.u + " does not match the operator shape");
    return u;
  }
  if (f.u_expr.empty()) throw ConfigError("MissingArgument", "cli: need --u or --u-expr");
  std::vector<Expr> parts;
  std::stringstream ss(f.u_expr);
  for (std::string item; std::getline(ss, item, ';');) parts.push_back(Expr::parse(item));
  if (static_cast<int>(parts.size()) != cfg.op.d)
    throw ConfigError("ShapeMismatch", "cli: --u-expr needs d expressions separated by ';'");
  const Grid g = cfg.macro_grid();
  PeriodicField u(g, cfg.op.d);
  const auto N = static_cast<std::size_t>(g.dim());
  double x[3];
  for (std::size_t j = 0; j < g.size(); ++j) {
    g.coords(j, std::span<double>(x, N));
    for (int c = 0; c < cfg.op.d; ++c)
      u.at(j, c) = parts[static_cast<std::size_t>(c)].eval({std::span<const double>(x, N), {}, {}});
  }
  return u;
}

std::vector<int> eps_list(const Flags& f, const RunConfig& cfg) {
  return f.eps.empty() ? cfg.eps : parse_epsilon_list(f.eps);
}

// ----------------------------------------------------------------------------

int cmd_rank(const Flags& f, std::ostream& out) {
  const RunConfig cfg = load(f);
  const Operator op(cfg.operator_spec());
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::vector<double>> xs(32, std::vector<double>(static_cast<std::size_t>(op.N())));
  for (auto& x : xs)
    for (double& v : x) v = unif(rng);
  const auto dirs = default_directions(op.N(), 64, cfg.seed);
  const int r = check_constant_rank(op, xs, dirs);

  Json body;
  body["options"] = config_json(cfg);
  body["rank"] = r;
  body["x_samples"] = xs.size();
  body["directions"] = dirs.size();
  Json warnings = Json::array();
  if (cfg.op.rank && *cfg.op.rank != r)
    warnings.push_back("declared rank " + std::to_string(*cfg.op.rank) +
                       " differs from the computed rank " + std::to_string(r));
  const double defect = op.periodicity_defect(xs);
  body["periodicity_defect"] = defect;
  if (defect > 1e-9)
    warnings.push_back("coefficients are not 1-periodic in x (defect " + std::to_string(defect) + ")");
  body["warnings"] = warnings;
  emit(out, resolve_output(f.out.empty() ? "rank.json" : f.out, cfg.output_dir), "rank", body);
  out << "rank r=" << r << "\n";
  for (const auto& w : warnings) out << "warning: " << w.get<std::string>() << "\n";
  return 0;
}

int cmd_project(const Flags& f, std::ostream& out) {
  const RunConfig cfg = load(f);
  const Operator op(cfg.operator_spec());
  if (f.in.empty()) throw ConfigError("MissingArgument", "cli/project: need --in");
  const auto psi = load_field(f.in, Domain::cell);
  if (psi.grid().dim() != op.N() || psi.components() != op.d())
    throw ConfigError("ShapeMismatch", "cli/project: field does not match the operator shape");
  const auto x = point(f.x, op.N(), "x");
  const PointProjector pp(op, x, psi.grid());
  const auto proj = project(pp, psi);
  const std::string field_path = resolve_output(f.out.empty() ? "proj.aqxf" : f.out, cfg.output_dir);
  save_field(field_path, proj);

  Json body;
  body["options"] = config_json(cfg);
  body["x"] = x;
  body["grid"] = psi.grid().dims();
  body["projection"] = to_json(projection_report(pp, psi, cfg.p));
  body["output_field"] = field_path;
  emit(out, resolve_output(f.report.empty() ? "report.json" : f.report, cfg.output_dir), "project",
       body);
  out << "field: " << field_path << "\n";
  return 0;
}

std::vector<std::vector<double>> sweep_points(const std::string& text, int d) {
  const auto colon1 = text.find(':');
  const auto colon2 = text.find(':', colon1 == std::string::npos ? 0 : colon1 + 1);
  if (colon1 == std::string::npos || colon2 == std::string::npos)
    throw ConfigError("InvalidArgument", "cli/envelope: --sweep expects lo:hi:count");
  const double lo = std::stod(text.substr(0, colon1));
  const double hi = std::stod(text.substr(colon1 + 1, colon2 - colon1 - 1));
  const int n = std::stoi(text.substr(colon2 + 1));
  if (n < 1 || n > 1000) throw ConfigError("InvalidArgument", "cli/envelope: sweep count out of range");
  std::vector<std::vector<double>> pts;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  for (;;) {
    std::vector<double> p(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a)
      p[static_cast<std::size_t>(a)] = n == 1 ? lo : lo + (hi - lo) * idx[static_cast<std::size_t>(a)] / (n - 1);
    pts.push_back(p);
    int a = d - 1;
    while (a >= 0 && idx[static_cast<std::size_t>(a)] == n - 1) idx[static_cast<std::size_t>(a--)] = 0;
    if (a < 0) break;
    ++idx[static_cast<std::size_t>(a)];
  }
  return pts;
}

int cmd_envelope(const Flags& f, std::ostream& out) {
  const RunConfig cfg = load(f);
  const Operator op(cfg.operator_spec());
  const auto integrand = cfg.make_integrand();
  auto opts = cfg.envelope_options();
  const auto x = point(f.x, op.N(), "x");
  Json body;
  body["options"] = config_json(cfg);
  body["x"] = x;
  const std::string path = resolve_output(f.out.empty() ? "envelope.json" : f.out, cfg.output_dir);

  if (!f.sweep.empty()) {
    const auto pts = sweep_points(f.sweep, op.d());
    opts.keep_minimizer = false;
    std::vector<EnvelopeResult> res(pts.size());
    for_each_index(pts.size(), Exec::parallel,
                   [&](std::size_t i) { res[i] = qa_envelope(op, integrand, x, pts[i], opts); });
    Json rows = Json::array();
    for (std::size_t i = 0; i < pts.size(); ++i)
      rows.push_back({{"xi", pts[i]},
                      {"value", res[i].value},
                      {"baseline", res[i].baseline},
                      {"iterations", res[i].iterations},
                      {"grad_norm", res[i].grad_norm}});
    body["sweep"] = rows;
    emit(out, path, "envelope", body);
    return 0;
  }

  const auto xi = point(f.xi, op.d(), "xi");
  const auto res = qa_envelope(op, integrand, x, xi, opts);
  std::string mpath;
  if (f.minimizer.empty()) {
    const std::filesystem::path rp(path);
    mpath = (rp.parent_path() / (rp.stem().string() + "_minimizer.aqxf")).string();
  } else {
    mpath = resolve_output(f.minimizer, cfg.output_dir);
  }
  save_field(mpath, res.minimizer);
  body["xi"] = xi;
  body["result"] = to_json(res);
  body["minimizer"] = mpath;
  emit(out, path, "envelope", body);
  out << "value " << Json(res.value).dump() << "\n";
  return 0;
}

int cmd_fhom(const Flags& f, std::ostream& out) {
  const RunConfig cfg = load(f);
  const Operator op(cfg.operator_spec());
  const auto integrand = cfg.make_integrand();
  auto opts = cfg.envelope_options();
  opts.keep_minimizer = false;
  const auto x = point(f.x, op.N(), "x");
  const auto xi = point(f.xi, op.d(), "xi");
  const int n_max = f.n_max > 0 ? f.n_max : cfg.n_max;
  const auto trace = fhom(op, integrand, x, xi, n_max, opts);

  Json body;
  body["options"] = config_json(cfg);
  body["x"] = x;
  body["xi"] = xi;
  body["trace"] = to_json(trace);
  emit(out, resolve_output(f.out.empty() ? "fhom.json" : f.out, cfg.output_dir), "fhom", body);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < trace.n_list.size(); ++i)
    rows.push_back({static_cast<double>(trace.n_list[i]), trace.values[i], trace.results[i].grad_norm});
  const std::string csv = resolve_output(f.csv.empty() ? "fhom.csv" : f.csv, cfg.output_dir);
  write_csv(csv, {"n", "value", "residual"}, rows);
  out << "fhom " << Json(trace.fhom_estimate).dump() << "\n";
  return 0;
}

int cmd_ehom(const Flags& f, std::ostream& out) {
  const RunConfig cfg = load(f);
  const Operator op(cfg.operator_spec());
  const auto integrand = cfg.make_integrand();
  const auto u = macro_field(f, cfg);
  const int n_max = f.n_max > 0 ? f.n_max : cfg.n_max;
  const auto res = ehom(op, integrand, u, n_max, cfg.envelope_options(), cfg.membership_tol);

  Json body;
  body["options"] = config_json(cfg);
  body["membership"] = to_json(res.membership);
  body["feasible"] = res.feasible;
  if (res.feasible) {
    body["value"] = res.value;
    body["n"] = res.n_list;
    body["per_n"] = res.per_n;
  } else {
    body["value"] = "Infeasible";
  }
  emit(out, resolve_output(f.out.empty() ? "ehom.json" : f.out, cfg.output_dir), "ehom", body);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < res.n_list.size(); ++i)
    rows.push_back({static_cast<double>(res.n_list[i]), res.per_n[i], res.per_n_grad[i]});
  write_csv(resolve_output(f.csv.empty() ? "ehom.csv" : f.csv, cfg.output_dir),
            {"n", "value", "residual"}, rows);
  out << "ehom " << (res.feasible ? Json(res.value).dump() : std::string("Infeasible")) << "\n";
  return 0;
}

int cmd_relaxcheck(const Flags& f, std::ostream& out) {
  const RunConfig cfg = load(f);
  const Operator op(cfg.operator_spec());
  const auto integrand = cfg.make_integrand();
  const auto u = macro_field(f, cfg);
  const Grid output =
      f.output_grid.empty() ? u.grid() : Grid(grid_arg(f.output_grid), Domain::macro);
  const auto rep = relaxation_check(op, integrand, u, eps_list(f, cfg), output,
                                    cfg.envelope_options(), cfg.membership_tol);
  Json body;
  body["options"] = config_json(cfg);
  body["relaxation"] = to_json(rep);
  emit(out, resolve_output(f.out.empty() ? "relaxcheck.json" : f.out, cfg.output_dir), "relaxcheck",
       body);
  std::vector<std::vector<double>> rows;
  for (const auto& r : rep.rows) rows.push_back({1.0 / r.k, r.energy, r.residual});
  write_csv(resolve_output(f.csv.empty() ? "relaxcheck.csv" : f.csv, cfg.output_dir),
            {"eps", "value", "residual"}, rows);
  out << "envelope integral " << Json(rep.envelope_integral).dump() << "\n";
  return 0;
}

int cmd_twoscale(const Flags& f, std::ostream& out) {
  const RunConfig cfg = load(f);
  if (f.in.empty()) throw ConfigError("MissingArgument", "cli/twoscale: need --in");
  const auto ks = eps_list(f, cfg);
  Json body;
  body["options"] = config_json(cfg);
  body["mode"] = f.mode;
  Json rows = Json::array();

  if (f.mode == "unfold") {
    const auto u = load_field(f.in, Domain::macro);
    const double norm = lp_norm(u, 2.0);
    for (int k : ks) {
      const auto T = unfold(u, k, f.micro);
      const auto dist = unfold_convergence(u, {k}, f.micro).front();
      rows.push_back({{"eps", eps_text(k)},
                      {"micro_grid", T.micro().dims()},
                      {"norm_u", norm},
                      {"norm_unfolded", T.lp_norm(2.0)},
                      {"distance", dist}});
      if (!f.field_out.empty())
        save_two_scale(resolve_output(f.field_out + "_" + std::to_string(k) + ".aqxf", cfg.output_dir), T);
    }
  } else if (f.mode == "generate" || f.mode == "residual") {
    const Operator op(cfg.operator_spec());
    const auto v = load_two_scale(f.in);
    std::optional<Grid> output;
    if (!f.output_grid.empty()) output = Grid(grid_arg(f.output_grid), Domain::macro);
    const auto bundle = generate_sequence(op, v, ks, output, cfg.membership_tol);
    Json prov;
    for (const auto& [k, val] : bundle.provenance) prov[k] = val;
    body["provenance"] = prov;
    std::vector<ResidualRow> res;
    if (f.mode == "residual") res = twoscale_residual(bundle, v, default_test_bank(op.N(), op.d()));
    for (std::size_t i = 0; i < ks.size(); ++i) {
      Json row{{"eps", eps_text(ks[i])},
               {"hneg_A_u_eps", hneg_norm(apply_A_macro(op, bundle.fields[i]))}};
      if (!res.empty()) {
        row["weak_gap"] = res[i].weak_gap;
        row["strong_gap"] = res[i].strong_gap ? Json(*res[i].strong_gap) : Json(nullptr);
      }
      if (!f.field_out.empty()) {
        const auto p = resolve_output(f.field_out + "_" + std::to_string(ks[i]) + ".aqxf", cfg.output_dir);
        save_field(p, bundle.fields[i]);
        row["field"] = p;
      }
      rows.push_back(row);
    }
  } else {
    throw ConfigError("InvalidArgument", "cli/twoscale: --mode must be unfold, generate or residual");
  }
  body["rows"] = rows;
  emit(out, resolve_output(f.out.empty() ? "twoscale.json" : f.out, cfg.output_dir), "twoscale", body);
  return 0;
}

int cmd_verify(const Flags& f, std::ostream& out) {
  VerifyOptions o;
  std::string dir = ".";
  if (!f.config.empty()) {
    const RunConfig cfg = load(f);
    o.gate = cfg.operator_spec();
    o.seed = cfg.seed;
    dir = cfg.output_dir;
  }
  if (f.seed) o.seed = *f.seed;
  o.solver_tol_scale = f.tol_scale;
  if (!f.only.empty())
    for (double v : parse_vector(f.only)) o.only.push_back(static_cast<int>(v));
  const auto summary = verify_suite(o);
  for (const auto& r : summary.results) out << summary_line(r) << "\n";
  Json header = report_header("verify");
  header["timings"] = summary.timings();
  const std::string path = resolve_output(f.out.empty() ? "verify.json" : f.out, dir);
  write_report(path, header, summary.body());
  out << (summary.pass ? "all criteria passed" : "some criteria failed") << "\nreport: " << path << "\n";
  return summary.pass ? 0 : 4;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variable-coefficient A-quasiconvex envelopes and two-scale tools", "aqx"};
  app.require_subcommand(1);
  Flags f;
  std::uint64_t seed = 0;

  auto common = [&](CLI::App* s, bool config_required) {
    auto* c = s->add_option("--config", f.config, "YAML run configuration");
    if (config_required) c->required();
    s->add_option("--threads", f.threads, "Cap on OpenMP threads");
    s->add_option("--seed", seed, "Override the master seed");
    s->add_option("--out", f.out, "Output path");
  };

  auto* rank = app.add_subcommand("rank", "Constant-rank check of the configured operator");
  common(rank, true);

  auto* proj = app.add_subcommand("project", "Apply Pi(x) to a cell field");
  common(proj, true);
  proj->add_option("--in", f.in, "Input AQXF field")->required();
  proj->add_option("--x", f.x, "Macro point, comma separated");
  proj->add_option("--report", f.report, "JSON report path");

  auto* env = app.add_subcommand("envelope", "Q_A f(x, xi) by multistart projected descent");
  common(env, true);
  env->add_option("--x", f.x, "Macro point");
  env->add_option("--xi", f.xi, "Mean value xi");
  env->add_option("--sweep", f.sweep, "xi grid lo:hi:count on every axis");
  env->add_option("--minimizer", f.minimizer, "AQXF path for the minimizer");

  auto* fh = app.add_subcommand("fhom", "Cell-problem trace over dyadic scales");
  common(fh, true);
  fh->add_option("--x", f.x, "Macro point");
  fh->add_option("--xi", f.xi, "Mean value xi");
  fh->add_option("--n-max", f.n_max, "Largest scale (power of two)");
  fh->add_option("--csv", f.csv, "CSV trace path");

  auto* eh = app.add_subcommand("ehom", "Homogenized functional of a macro field");
  common(eh, true);
  eh->add_option("--u", f.u, "Macro field (AQXF)");
  eh->add_option("--u-expr", f.u_expr, "Macro field as expressions in x, ';' separated");
  eh->add_option("--n-max", f.n_max, "Largest scale (power of two)");
  eh->add_option("--csv", f.csv, "CSV trace path");

  auto* ts = app.add_subcommand("twoscale", "Unfolding, sequence generation and residuals");
  common(ts, true);
  ts->add_option("--mode", f.mode, "unfold | generate | residual")
      ->check(CLI::IsMember({"unfold", "generate", "residual"}));
  ts->add_option("--in", f.in, "Input AQXF (macro field or two-scale field)");
  ts->add_option("--eps", f.eps, "Comma separated list such as 1/4,1/8");
  ts->add_option("--micro", f.micro, "Unfolding micro grid (0 = M/k)");
  ts->add_option("--output-grid", f.output_grid, "Output macro grid for generated fields");
  ts->add_option("--field-out", f.field_out, "Prefix for AQXF field outputs");

  auto* rc = app.add_subcommand("relaxcheck", "Envelope integral against generated sequences");
  common(rc, true);
  rc->add_option("--u", f.u, "Macro field (AQXF)");
  rc->add_option("--u-expr", f.u_expr, "Macro field as expressions in x, ';' separated");
  rc->add_option("--eps", f.eps, "Comma separated list such as 1/4,1/8");
  rc->add_option("--output-grid", f.output_grid, "Output macro grid");
  rc->add_option("--csv", f.csv, "CSV trace path");

  auto* ver = app.add_subcommand("verify", "Run the acceptance criteria");
  common(ver, false);
  ver->add_option("--only", f.only, "Comma separated criterion ids");
  ver->add_option("--tol-scale", f.tol_scale, "Factor applied to descent tolerances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  CLI::App* sub = app.get_subcommands().front();
  for (auto* s : {rank, proj, env, fh, eh, ts, rc, ver})
    if (s == sub && s->count("--seed") > 0) f.seed = seed;
  set_thread_cap(f.threads);

  const std::string name = sub->get_name();
  try {
    if (name == "rank") return cmd_rank(f, out);
    if (name == "project") return cmd_project(f, out);
    if (name == "envelope") return cmd_envelope(f, out);
    if (name == "fhom") return cmd_fhom(f, out);
    if (name == "ehom") return cmd_ehom(f, out);
    if (name == "twoscale") return cmd_twoscale(f, out);
    if (name == "relaxcheck") return cmd_relaxcheck(f, out);
    return cmd_verify(f, out);
  } catch (const ConstantRankViolation& e) {
    err << "aqx " << name << ": " << e.what() << " [" << e.code() << "]\n";
    return exit_code(e.kind());
  } catch (const Error& e) {
    err << "aqx " << name << ": " << e.what() << " [" << e.code() << "]\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "aqx " << name << ": " << e.what() << "\n";
    return 3;
  }
}

}  // namespace aqx
