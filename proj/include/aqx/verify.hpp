#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aqx/exec.hpp"
#include "aqx/operator.hpp"
#include "aqx/report.hpp"

namespace aqx {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  Json measured = Json::object();
  Json tolerance = Json::object();
  std::string note;
  /// Wall time; reported in the header only, so bodies stay comparable.
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 20240601;
  /// Criteria to run (1..10); empty runs all.
  std::vector<int> only;
  Exec exec = Exec::parallel;
  /// Multiplies every descent stopping tolerance.
  double solver_tol_scale = 1.0;
  /// When set, the constant-rank gate runs on this operator before anything
  /// else and a violation aborts the suite.
  std::optional<OperatorSpec> gate;
};

struct VerifySummary {
  std::vector<CriterionResult> results;
  bool pass = true;
  std::uint64_t seed = 0;
  double solver_tol_scale = 1.0;
  Json gate = nullptr;

  /// Deterministic part: per-criterion status, measured values, tolerances.
  Json body() const;
  /// Wall times and runtime budgets.
  Json timings() const;
};

/// Runs the acceptance criteria. Criterion 10 reruns criteria 1..9 and
/// compares the rendered bodies byte for byte.
VerifySummary verify_suite(const VerifyOptions& opts);

/// One criterion by id (1..9).
CriterionResult run_criterion(int id, const VerifyOptions& opts);

/// "[PASS] 3 envelope_vs_convex_oracle: ..." style line.
std::string summary_line(const CriterionResult& r);

}  // namespace aqx
