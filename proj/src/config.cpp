#include "aqx/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "aqx/errors.hpp"

namespace aqx {

namespace {

void allow_keys(const YAML::Node& node, const std::string& section,
                const std::set<std::string>& keys) {
  if (!node.IsMap())
    throw ConfigError("InvalidConfig", "config: section '" + section + "' must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!keys.count(key))
      throw ConfigError("InvalidConfig", "config: unknown key '" + key + "' in section '" + section + "'");
  }
}

template <class T>
T get(const YAML::Node& node, const char* key, T fallback) {
  if (!node || !node[key]) return fallback;
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("InvalidConfig", std::string("config: bad value for '") + key + "'");
  }
}

std::vector<int> grid_dims(const YAML::Node& node, const char* key, std::vector<int> fallback,
                           int N) {
  if (!node || !node[key]) {
    fallback.resize(static_cast<std::size_t>(N), fallback.front());
    return fallback;
  }
  const auto v = node[key];
  std::vector<int> dims;
  if (v.IsScalar()) dims.assign(static_cast<std::size_t>(N), v.as<int>());
  else dims = v.as<std::vector<int>>();
  if (static_cast<int>(dims.size()) != N)
    throw ConfigError("InvalidConfig", std::string("config: grid '") + key + "' needs N entries");
  for (int m : dims)
    if (m < 4 || m % 2 != 0)
      throw ConfigError("InvalidConfig", std::string("config: grid '") + key + "' sizes must be even and >= 4");
  return dims;
}

std::string scalar_text(const YAML::Node& n) { return n.as<std::string>(); }

}  // namespace

int parse_epsilon(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  double eps = 0.0;
  try {
    if (auto slash = s.find('/'); slash != std::string::npos) {
      const double num = std::stod(s.substr(0, slash));
      const double den = std::stod(s.substr(slash + 1));
      eps = num / den;
    } else {
      eps = std::stod(s);
    }
  } catch (const std::exception&) {
    throw ConfigError("InvalidEpsilon", "config: cannot read eps '" + text + "'");
  }
  if (!(eps > 0.0) || eps > 1.0)
    throw ConfigError("InvalidEpsilon", "config: eps must lie in (0, 1], got '" + text + "'");
  const double k = 1.0 / eps;
  const double r = std::round(k);
  if (std::abs(k - r) > 1e-9 * r)
    throw ConfigError("InvalidEpsilon", "config: eps must be 1/k for an integer k, got '" + text + "'");
  return static_cast<int>(r);
}

std::vector<int> parse_epsilon_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (item.find_first_not_of(" \t") != std::string::npos) out.push_back(parse_epsilon(item));
  if (out.empty()) throw ConfigError("InvalidEpsilon", "config: empty eps list");
  return out;
}

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("InvalidArgument", "cli: cannot read number '" + item + "'");
    }
  }
  return out;
}

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("ConfigSyntax", std::string("config: ") + e.what());
  }
  RunConfig cfg;
  if (!root || root.IsNull()) return cfg;
  allow_keys(root, "top level", {"operator", "integrand", "grid", "solver", "output"});

  try {
    if (const auto op = root["operator"]) {
      allow_keys(op, "operator", {"name", "N", "d", "l", "a", "a1", "m", "base", "A", "rank"});
      auto& o = cfg.op;
      o.name = get<std::string>(op, "name", o.name);
      if (o.name == "curl_perturbed") o.l = 4;
      if (o.name == "full_gradient") {
        o.d = 1;
        o.l = o.N;
      }
      o.N = get<int>(op, "N", o.N);
      o.d = get<int>(op, "d", o.d);
      o.l = get<int>(op, "l", o.l);
      if (o.name == "full_gradient") o.l = get<int>(op, "l", o.N);
      if (op["a"]) o.a = scalar_text(op["a"]);
      if (op["a1"]) o.a1 = scalar_text(op["a1"]);
      if (op["m"]) o.m = scalar_text(op["m"]);
      if (op["base"]) o.base = op["base"].as<std::vector<std::vector<double>>>();
      if (op["A"]) o.coeffs = op["A"].as<std::vector<std::vector<std::string>>>();
      if (op["rank"]) o.rank = op["rank"].as<int>();
    }
    if (const auto in = root["integrand"]) {
      allow_keys(in, "integrand", {"f", "p", "C"});
      if (in["f"]) cfg.integrand = scalar_text(in["f"]);
      cfg.p = get<double>(in, "p", cfg.p);
      cfg.C = get<double>(in, "C", cfg.C);
    }
    const auto grid = root["grid"];
    if (grid) allow_keys(grid, "grid", {"macro", "micro"});
    cfg.macro = grid_dims(grid, "macro", {16}, cfg.op.N);
    cfg.micro = grid_dims(grid, "micro", {64}, cfg.op.N);
    if (const auto s = root["solver"]) {
      allow_keys(s, "solver", {"starts", "max_iter", "tol", "n_max", "eps", "seed", "membership_tol"});
      cfg.random_starts = get<int>(s, "starts", cfg.random_starts);
      cfg.max_iter = get<int>(s, "max_iter", cfg.max_iter);
      cfg.tol = get<double>(s, "tol", cfg.tol);
      cfg.n_max = get<int>(s, "n_max", cfg.n_max);
      cfg.seed = get<std::uint64_t>(s, "seed", cfg.seed);
      cfg.membership_tol = get<double>(s, "membership_tol", cfg.membership_tol);
      if (s["eps"]) {
        cfg.eps.clear();
        if (s["eps"].IsScalar()) cfg.eps = parse_epsilon_list(s["eps"].as<std::string>());
        else
          for (const auto& e : s["eps"]) cfg.eps.push_back(parse_epsilon(e.as<std::string>()));
      }
    }
    if (const auto out = root["output"]) {
      allow_keys(out, "output", {"dir"});
      cfg.output_dir = get<std::string>(out, "dir", cfg.output_dir);
    }
  } catch (const YAML::Exception& e) {
    throw ConfigError("InvalidConfig", std::string("config: ") + e.what());
  }

  if (!(cfg.p > 1.0) || !std::isfinite(cfg.p))
    throw ConfigError("InvalidConfig", "config: growth exponent p must lie in (1, inf)");
  if (cfg.random_starts < 0 || cfg.max_iter < 1 || !(cfg.tol > 0.0))
    throw ConfigError("InvalidConfig", "config: invalid solver options");
  if (cfg.n_max < 1 || (cfg.n_max & (cfg.n_max - 1)) != 0)
    throw ConfigError("InvalidConfig", "config: n_max must be a power of two");
  // Parse every expression now so malformed input fails before any work.
  (void)cfg.operator_spec();
  (void)cfg.make_integrand();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("ConfigUnreadable", "config: cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

OperatorSpec RunConfig::operator_spec() const {
  OperatorSpec s;
  if (op.name == "divergence_perturbed") s = divergence_perturbed(op.a);
  else if (op.name == "curl_perturbed") s = curl_perturbed(op.a1);
  else if (op.name == "full_gradient") s = full_gradient(op.N);
  else if (op.name == "scaled_constant") {
    if (op.base.empty())
      throw ConfigError("InvalidConfig", "config: scaled_constant needs base matrices");
    s = scaled_constant(op.m, op.l, op.d, op.base);
  } else if (op.name == "custom") {
    if (static_cast<int>(op.coeffs.size()) != op.N)
      throw ConfigError("InvalidConfig", "config: custom operator needs N coefficient lists");
    s.name = "custom";
    s.N = op.N;
    s.d = op.d;
    s.l = op.l;
    for (const auto& row : op.coeffs) {
      if (static_cast<int>(row.size()) != op.l * op.d)
        throw ConfigError("InvalidConfig", "config: each coefficient list needs l*d entries");
      std::vector<Expr> m;
      for (const auto& e : row) m.push_back(Expr::parse(e));
      s.coeffs.push_back(std::move(m));
    }
  } else {
    throw ConfigError("InvalidConfig", "config: unknown operator '" + op.name + "'");
  }
  if (s.N != op.N && op.name != "scaled_constant")
    throw ConfigError("InvalidConfig", "config: operator '" + op.name + "' needs N = " + std::to_string(s.N));
  s.declared_rank = op.rank;
  return s;
}

Integrand RunConfig::make_integrand() const {
  const auto s = operator_spec();
  return Integrand::parse(integrand, s.N, s.d, p, C);
}

EnvelopeOptions RunConfig::envelope_options() const {
  EnvelopeOptions o;
  o.micro = micro;
  o.random_starts = random_starts;
  o.max_iter = max_iter;
  o.tol = tol;
  o.seed = seed;
  return o;
}

Grid RunConfig::macro_grid() const { return Grid(macro, Domain::macro); }

}  // namespace aqx
