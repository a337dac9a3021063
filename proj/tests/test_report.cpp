#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "aqx/report.hpp"

using namespace aqx;
namespace fs = std::filesystem;

TEST_SUITE("report") {
  TEST_CASE("header and body") {
    const auto h = report_header("rank");
    CHECK(h["tool"] == "aqx");
    CHECK(h["command"] == "rank");
    CHECK(h.contains("version"));
    CHECK(h.contains("timestamp"));
    Json body;
    body["rank"] = 1;
    const auto text = render_report(h, body);
    const auto parsed = Json::parse(text);
    CHECK(parsed["body"]["rank"] == 1);
    CHECK(text.back() == '\n');
  }

  TEST_CASE("output paths") {
    const fs::path tmp = fs::temp_directory_path() / "aqx_report_test";
    fs::remove_all(tmp);
    const char* saved = std::getenv("AQX_OUTPUT_DIR");
    const std::string keep = saved ? saved : "";
    unsetenv("AQX_OUTPUT_DIR");
    CHECK(resolve_output("/abs/file.json", "ignored") == "/abs/file.json");
    const auto p = resolve_output("sub/a.json", tmp.string());
    CHECK(p == (tmp / "sub/a.json").string());
    CHECK(fs::is_directory(tmp / "sub"));
    setenv("AQX_OUTPUT_DIR", (tmp / "env").c_str(), 1);
    CHECK(resolve_output("b.json", tmp.string()) == (tmp / "env/b.json").string());
    write_csv(resolve_output("t.csv", "."), {"n", "value"}, {{1, 0.5}, {2, 0.25}});
    std::ifstream in(tmp / "env/t.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "n,value");
    std::getline(in, line);
    CHECK(line == "1,0.5");
    if (keep.empty())
      unsetenv("AQX_OUTPUT_DIR");
    else
      setenv("AQX_OUTPUT_DIR", keep.c_str(), 1);
    fs::remove_all(tmp);
  }
}
