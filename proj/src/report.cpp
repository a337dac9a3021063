#include "aqx/report.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "aqx/errors.hpp"

namespace aqx {

namespace fs = std::filesystem;

Json report_header(const std::string& command) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ts;
  ts << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  Json h;
  h["tool"] = "aqx";
  h["version"] = "0.1.0";
  h["command"] = command;
  h["timestamp"] = ts.str();
  return h;
}

std::string render_report(const Json& header, const Json& body) {
  Json doc;
  doc["header"] = header;
  doc["body"] = body;
  return doc.dump(2) + "\n";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("OutputUnwritable", "cli: cannot write '" + path + "'");
  out << text;
}

void write_report(const std::string& path, const Json& header, const Json& body) {
  write_text(path, render_report(header, body));
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
  write_text(path, out.str());
}

std::string resolve_output(const std::string& path, const std::string& dir) {
  fs::path p(path);
  if (p.is_absolute()) return p.string();
  std::string base = dir;
  if (const char* env = std::getenv("AQX_OUTPUT_DIR"); env && *env) base = env;
  fs::path full = fs::path(base) / p;
  if (full.has_parent_path()) fs::create_directories(full.parent_path());
  return full.string();
}

Json to_json(const EnvelopeOptions& o, int N) {
  Json j;
  j["micro_grid"] = o.grid(N).dims();
  j["random_starts"] = o.random_starts;
  j["max_iter"] = o.max_iter;
  j["tol"] = o.tol;
  j["seed"] = o.seed;
  j["warm_starts"] = o.warm_starts.size();
  return j;
}

Json to_json(const EnvelopeResult& r) {
  Json j;
  j["value"] = r.value;
  j["baseline"] = r.baseline;
  j["iterations"] = r.iterations;
  j["grad_norm"] = r.grad_norm;
  j["grid"] = r.grid;
  Json starts = Json::array();
  for (const auto& s : r.starts) {
    Json e;
    e["kind"] = s.kind;
    e["index"] = s.index;
    e["sigma"] = s.sigma;
    e["value"] = s.value;
    e["iterations"] = s.iterations;
    e["grad_norm"] = s.grad_norm;
    e["converged"] = s.converged;
    starts.push_back(e);
  }
  j["starts"] = starts;
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const ProjectionReport& r) {
  Json j;
  j["input_mean"] = r.input_mean;
  j["residual"] = r.residual;
  j["idempotency_gap"] = r.idempotency_gap;
  j["deficiency_constant"] = r.deficiency;
  j["effective_constant"] = r.effective;
  j["defect"] = r.defect_lhs;
  j["defect_bound"] = r.defect_rhs;
  j["p"] = r.p;
  j["bound_status"] = r.bound_status;
  j["rank"] = r.rank;
  return j;
}

Json to_json(const FieldClassReport& r) {
  Json j;
  j["class"] = class_name(r.cls);
  j["mean_residual"] = r.mean_residual;
  j["ay_residual"] = r.ay_residual;
  j["macro_residual"] = r.macro_residual;
  j["tol"] = r.tol;
  j["pass"] = r.pass;
  return j;
}

Json to_json(const CellTrace& t) {
  Json j;
  j["n"] = t.n_list;
  j["values"] = t.values;
  j["fhom_estimate"] = t.fhom_estimate;
  Json per = Json::array();
  for (const auto& r : t.results) per.push_back(to_json(r));
  j["cells"] = per;
  return j;
}

Json to_json(const RelaxationReport& r) {
  Json j;
  j["membership"] = to_json(r.membership);
  j["envelope_integral"] = r.envelope_integral;
  j["output_grid"] = r.output_grid;
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json e;
    e["eps"] = "1/" + std::to_string(row.k);
    e["energy"] = row.energy;
    e["gap"] = row.gap;
    e["residual"] = row.residual;
    rows.push_back(e);
  }
  j["rows"] = rows;
  j["lower_bound_ok"] = r.lower_bound_ok;
  j["lower_tol"] = r.lower_tol;
  return j;
}

}  // namespace aqx
