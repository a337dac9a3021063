#include <doctest.h>

#include "aqx/config.hpp"
#include "aqx/errors.hpp"

using namespace aqx;

TEST_SUITE("config") {
  TEST_CASE("shipped configs load") {
    const auto c = load_config(AQX_SOURCE_DIR "/configs/ex36.yaml");
    CHECK(c.op.name == "divergence_perturbed");
    CHECK(c.op.rank == 1);
    CHECK(c.p == 4.0);
    CHECK(c.macro == std::vector<int>{16, 16});
    CHECK(c.eps == std::vector<int>{4, 8, 16});
    CHECK(c.seed == 20240601u);
    CHECK(c.make_integrand().symbolic_gradient());
    const Operator op(c.operator_spec());
    CHECK(op.reference_rank() == 1);
    for (const char* name : {"curl", "scaled", "cell", "rank_varying"})
      CHECK_NOTHROW(load_config(std::string(AQX_SOURCE_DIR "/configs/") + name + ".yaml"));
  }

  TEST_CASE("malformed configs") {
    CHECK_THROWS_AS(parse_config("operator:\n  name: divergence_perturbed\n  bogus: 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("integrand:\n  f: \"xi1^^2\"\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("grid:\n  micro: [15, 16]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("operator: [1, 2\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/aqx.yaml"), ConfigError);
  }

  TEST_CASE("epsilon parsing") {
    CHECK(parse_epsilon("1/4") == 4);
    CHECK(parse_epsilon("0.125") == 8);
    CHECK(parse_epsilon("1") == 1);
    CHECK_THROWS_AS(parse_epsilon("0.3"), ConfigError);
    CHECK_THROWS_AS(parse_epsilon("2"), ConfigError);
    CHECK_THROWS_AS(parse_epsilon("abc"), ConfigError);
    CHECK(parse_epsilon_list("1/4, 1/8,0.0625") == std::vector<int>{4, 8, 16});
    CHECK(parse_vector("0.1, -2") == std::vector<double>{0.1, -2});
  }
}
