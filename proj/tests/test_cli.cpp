#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "aqx/commands.hpp"
#include "aqx/report.hpp"

namespace fs = std::filesystem;

namespace {
struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "aqx");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = aqx::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  const fs::path p = fs::temp_directory_path() / "aqx_cli_test";
  fs::create_directories(p);
  return p;
}

std::string write_config(const std::string& name, const std::string& integrand) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << "operator:\n  name: divergence_perturbed\n  a: \"1\"\n"
                   << "integrand:\n  f: \"" << integrand << "\"\n  p: 4\n  C: 4\n"
                   << "grid:\n  macro: [4, 4]\n  micro: [8, 8]\n"
                   << "solver:\n  starts: 2\n  n_max: 2\n";
  return p.string();
}

const std::string kConfigs = AQX_SOURCE_DIR "/configs/";
}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("rank") {
    const auto out = (scratch() / "rank.json").string();
    const auto r = cli({"rank", "--config", kConfigs + "ex36.yaml", "--out", out});
    CHECK(r.code == 0);
    CHECK(r.out.find("r=1") != std::string::npos);
    std::ifstream in(out);
    const auto j = aqx::Json::parse(in);
    CHECK(j["header"]["command"] == "rank");
    CHECK(j["body"]["rank"] == 1);
  }

  TEST_CASE("rank-varying operator exits with code 2") {
    const auto r = cli({"rank", "--config", kConfigs + "rank_varying.yaml", "--out",
                        (scratch() / "rv.json").string()});
    CHECK(r.code == 2);
    CHECK_FALSE(r.err.empty());
  }

  TEST_CASE("envelope between the wells is nearly zero") {
    const auto cfg = write_config("well.yaml", "(xi1^2 - 1)^2 + xi2^2");
    const auto r = cli({"envelope", "--config", cfg, "--xi", "0,0", "--out",
                        (scratch() / "env.json").string()});
    REQUIRE(r.code == 0);
    const auto at = r.out.find("value ");
    REQUIRE(at != std::string::npos);
    CHECK(std::stod(r.out.substr(at + 6)) < 0.15);
    CHECK(fs::exists(scratch() / "env_minimizer.aqxf"));
  }

  TEST_CASE("malformed expression exits with code 1 and reports the offset") {
    const auto cfg = write_config("bad.yaml", "xi1^2 + * xi2");
    const auto r = cli({"envelope", "--config", cfg, "--xi", "0,0"});
    CHECK(r.code == 1);
    CHECK(r.err.find("offset 8") != std::string::npos);
  }

  TEST_CASE("division by zero in the integrand exits with code 3") {
    const auto cfg = write_config("div.yaml", "1 / (xi1 - xi1)");
    const auto r = cli({"envelope", "--config", cfg, "--xi", "0,0", "--out",
                        (scratch() / "div.json").string()});
    CHECK(r.code == 3);
  }

  TEST_CASE("usage errors exit with code 1") {
    CHECK(cli({}).code == 1);
    CHECK(cli({"rank"}).code == 1);
    CHECK(cli({"envelope", "--config", kConfigs + "ex36.yaml", "--xi", "a,b"}).code == 1);
  }

  TEST_CASE("fhom and ehom write traces") {
    const auto cfg = write_config("quad.yaml", "xi1^2 + xi2^2");
    const auto csv = (scratch() / "fhom.csv").string();
    auto r = cli({"fhom", "--config", cfg, "--xi", "1,2", "--csv", csv, "--out",
                  (scratch() / "fhom.json").string()});
    CHECK(r.code == 0);
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "n,value,residual");

    r = cli({"ehom", "--config", cfg, "--u-expr", "0;1", "--out", (scratch() / "ehom.json").string(),
             "--csv", (scratch() / "ehom.csv").string()});
    CHECK(r.code == 0);
    r = cli({"ehom", "--config", cfg, "--u-expr", "cos(2*pi*x1);0", "--out",
             (scratch() / "ehom_bad.json").string()});
    CHECK(r.out.find("Infeasible") != std::string::npos);
  }
}
