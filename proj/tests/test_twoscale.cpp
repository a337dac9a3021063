#include <doctest.h>

#include "aqx/errors.hpp"
#include "aqx/twoscale.hpp"
#include "helpers.hpp"

using namespace aqx;
using testing::kTwoPi;

TEST_SUITE("twoscale") {
  TEST_CASE("unfolding formula at a point") {
    auto u = [](std::span<const double> x) { return x[0]; };
    const std::vector<double> x{0.1, 0.3}, y{0.5, 0.0};
    CHECK(unfold_point(u, 0.25, x, y) == doctest::Approx(0.125));
    const std::vector<double> x2{0.6, 0.3}, y2{-0.25, 0.0};
    // eps floor(x / eps) = 0.5, eps (y - floor y) = 0.25 * 0.75
    CHECK(unfold_point(u, 0.25, x2, y2) == doctest::Approx(0.5 + 0.1875));
  }

  TEST_CASE("unfolding with the matched micro grid is an isometry") {
    const Grid macro = Grid::cube(2, 32, Domain::macro);
    const auto u = testing::random_modes(macro, 2, 5, 3);
    for (int k : {2, 4, 8}) {
      const auto t = unfold(u, k);
      CHECK(t.micro().dims(0) == 32 / k);
      CHECK(t.lp_norm(2) == doctest::Approx(lp_norm(u, 2)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(unfold(u, 3), ConfigError);
    CHECK_THROWS_AS(check_epsilon(macro, 4, 3), ConfigError);
    const auto d = unfold_convergence(u, {2, 4, 8});
    CHECK(d[1] < d[0]);
    CHECK(d[2] < d[1]);
  }

  TEST_CASE("test bank") {
    const auto bank = default_test_bank(2, 2, 1);
    CHECK_FALSE(bank.empty());
    int per_component[2] = {0, 0};
    for (const auto& t : bank) ++per_component[t.component];
    CHECK(per_component[0] == per_component[1]);
    const TestFunction phi{{1, 0}, false, {0, 1}, true, 0};
    const std::vector<double> x{0.25, 0.0}, y{0.0, 0.25};
    CHECK(phi.x_part(x) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(phi.y_part(y) == doctest::Approx(1.0));
  }

  TEST_CASE("generated sequences converge two-scale to their source") {
    const Operator op(divergence_perturbed("1"));
    const Grid macro = Grid::cube(2, 8, Domain::macro);
    const Grid micro = Grid::cube(2, 8);
    TwoScaleField v(macro, micro, 2);
    double x[2], y[2];
    for (std::size_t j = 0; j < macro.size(); ++j) {
      macro.coords(j, x);
      for (std::size_t k = 0; k < micro.size(); ++k) {
        micro.coords(k, y);
        v.at(j, k, 0) = 0.0;
        v.at(j, k, 1) = 1.0 + std::cos(kTwoPi * x[1]) * std::sin(kTwoPi * y[0]);
      }
    }
    const auto bundle = generate_sequence(op, v, {2, 4, 8}, Grid::cube(2, 64, Domain::macro));
    REQUIRE(bundle.fields.size() == 3);
    const auto rows = twoscale_residual(bundle, v, default_test_bank(2, 2, 1));
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].weak_gap <= rows[i - 1].weak_gap + 1e-12);

    TwoScaleField bad(macro, micro, 2);
    for (std::size_t j = 0; j < macro.size(); ++j)
      for (std::size_t k = 0; k < micro.size(); ++k) {
        micro.coords(k, y);
        bad.at(j, k, 0) = std::sin(kTwoPi * y[0]);
      }
    try {
      generate_sequence(op, bad, {2});
      FAIL("expected NotAFreeField");
    } catch (const ConfigError& e) {
      CHECK(e.code() == "NotAFreeField");
    }
  }

  TEST_CASE("serial and parallel sequence generation agree bit for bit") {
    const Operator op(divergence_perturbed("3/4 + sin(2*pi*x1)/4"));
    const Grid macro = Grid::cube(2, 8, Domain::macro);
    const Grid micro = Grid::cube(2, 8);
    TwoScaleField v(macro, micro, 2);
    for (std::size_t j = 0; j < macro.size(); ++j)
      v.set_slice(j, testing::random_modes(micro, 2, 2, static_cast<unsigned>(j)));
    // Keep the fluctuation free; the macro part vanishes.
    const auto a = generate_sequence(op, v, {4}, std::nullopt, 1e9, Exec::serial);
    const auto b = generate_sequence(op, v, {4}, std::nullopt, 1e9, Exec::parallel);
    CHECK(testing::max_abs_diff(a.fields[0], b.fields[0]) == 0.0);
  }
}
