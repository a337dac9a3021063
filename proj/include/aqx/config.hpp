#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aqx/envelope.hpp"
#include "aqx/integrand.hpp"
#include "aqx/operator.hpp"

namespace aqx {

/// Operator declaration as written in the config file.
struct OperatorDecl {
  std::string name = "divergence_perturbed";
  int N = 2;
  int d = 2;
  int l = 1;
  std::string a = "1";   // divergence_perturbed
  std::string a1 = "1";  // curl_perturbed
  std::string m = "1";   // scaled_constant
  std::vector<std::vector<double>> base;         // scaled_constant, one l*d list per axis
  std::vector<std::vector<std::string>> coeffs;  // custom, one l*d list per axis
  std::optional<int> rank;
};

/// Parsed run configuration (YAML with sections operator, integrand, grid,
/// solver, output).
struct RunConfig {
  OperatorDecl op;
  std::string integrand = "xi1^2 + xi2^2";
  double p = 2.0;
  double C = 0.0;
  std::vector<int> macro{16, 16};
  std::vector<int> micro{64, 64};
  int random_starts = 8;
  int max_iter = 5000;
  double tol = 1e-8;
  int n_max = 8;
  std::vector<int> eps{4, 8, 16};  // stored as 1/eps
  double membership_tol = 1e-7;
  std::uint64_t seed = 20240601;
  std::string output_dir = ".";

  OperatorSpec operator_spec() const;
  Integrand make_integrand() const;
  EnvelopeOptions envelope_options() const;
  Grid macro_grid() const;
};

/// Throws ConfigError("ConfigSyntax") / ("InvalidConfig") on malformed input;
/// expressions are parsed eagerly so syntax errors surface here.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// "1/4" -> 4, "0.125" -> 8; throws ConfigError("InvalidEpsilon") unless eps
/// is the reciprocal of a positive integer.
int parse_epsilon(const std::string& text);
std::vector<int> parse_epsilon_list(const std::string& text);

/// Comma separated list of doubles.
std::vector<double> parse_vector(const std::string& text);

}  // namespace aqx
