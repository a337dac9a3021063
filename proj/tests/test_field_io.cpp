#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aqx/errors.hpp"
#include "aqx/field_io.hpp"
#include "aqx/twoscale_field.hpp"
#include "helpers.hpp"

using namespace aqx;

TEST_SUITE("field_io") {
  TEST_CASE("byte layout of a small field") {
    std::ostringstream out;
    const std::vector<double> vals{1.0, -2.0, 0.5, 4.0};
    write_aqxf(out, {2, 1}, 2, vals);
    const std::string s = out.str();
    REQUIRE(s.size() == 4 + 4 * 5 + 8 * 4);
    CHECK(s.substr(0, 4) == "AQXF");
    CHECK(static_cast<unsigned char>(s[4]) == 1);  // version, little endian
    CHECK(static_cast<unsigned char>(s[8]) == 2);  // N
    CHECK(static_cast<unsigned char>(s[12]) == 2); // d
    std::istringstream in(s);
    const auto raw = read_aqxf(in);
    CHECK(raw.dims == std::vector<int>{2, 1});
    CHECK(raw.components == 2);
    CHECK(raw.values == vals);
  }

  TEST_CASE("files round trip and corrupt input is rejected") {
    const auto dir = std::filesystem::temp_directory_path() / "aqx_field_io_test";
    std::filesystem::create_directories(dir);
    const Grid g = Grid::cube(2, 8, Domain::macro);
    const auto u = testing::random_modes(g, 2, 2, 5);
    const auto path = (dir / "u.aqxf").string();
    save_field(path, u);
    const auto back = load_field(path, Domain::macro);
    CHECK(back.grid() == g);
    CHECK(testing::max_abs_diff(u, back) == 0.0);

    TwoScaleField w(g, Grid::cube(2, 4), 2);
    for (std::size_t i = 0; i < w.values().size(); ++i) w.values()[i] = 0.25 * static_cast<double>(i);
    const auto wpath = (dir / "w.aqxf").string();
    save_two_scale(wpath, w);
    const auto wb = load_two_scale(wpath);
    CHECK(wb.macro() == g);
    CHECK(wb.micro() == Grid::cube(2, 4));
    CHECK(std::equal(w.values().begin(), w.values().end(), wb.values().begin()));

    std::ofstream(dir / "bad.aqxf", std::ios::binary) << "AQXG1234";
    CHECK_THROWS_AS(load_field((dir / "bad.aqxf").string()), ConfigError);
    std::string text;
    {
      std::ifstream in(path, std::ios::binary);
      text.assign(std::istreambuf_iterator<char>(in), {});
    }
    std::ofstream(dir / "short.aqxf", std::ios::binary) << text.substr(0, text.size() - 3);
    CHECK_THROWS_AS(load_field((dir / "short.aqxf").string()), ConfigError);
    std::filesystem::remove_all(dir);
  }
}
