// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Usage: aqx_acceptance [report.json]

#include <iostream>

#include "aqx/report.hpp"
#include "aqx/verify.hpp"

int main(int argc, char** argv) {
  aqx::VerifyOptions opts;
  const auto summary = aqx::verify_suite(opts);
  for (const auto& r : summary.results) std::cout << aqx::summary_line(r) << "\n";
  if (argc > 1) {
    auto header = aqx::report_header("verify");
    header["timings"] = summary.timings();
    aqx::write_report(aqx::resolve_output(argv[1], "."), header, summary.body());
  }
  std::cout << (summary.pass ? "acceptance: all criteria passed" : "acceptance: some criteria failed")
            << std::endl;
  return summary.pass ? 0 : 1;
}
