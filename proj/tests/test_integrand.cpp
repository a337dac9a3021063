#include <doctest.h>

#include <cmath>

#include "aqx/errors.hpp"
#include "aqx/integrand.hpp"

using namespace aqx;

TEST_SUITE("integrand") {
  TEST_CASE("values and symbolic gradients") {
    const auto f = Integrand::parse("(1 + x1) * (xi1^2 - 1)^2 + y2 * xi2^2", 2, 2, 4, 4);
    CHECK(f.symbolic_gradient());
    CHECK(f.gradient_warning().empty());
    CHECK(f.depends_on_x());
    CHECK(f.depends_on_y());
    const std::vector<double> x{0.5, 0}, y{0, 0.25}, xi{2, 3};
    CHECK(f.value(x, y, xi) == doctest::Approx(1.5 * 9 + 0.25 * 9));
    const auto g = f.gradient(x, y, xi);
    CHECK(g[0] == doctest::Approx(1.5 * 4 * 3 * 2));
    CHECK(g[1] == doctest::Approx(0.5 * 3));
    CHECK(f.gradient_crosscheck(64, 3) < 1e-6);
  }

  TEST_CASE("batch evaluation matches pointwise evaluation") {
    const auto f = Integrand::parse("(2 + sin(2*pi*y1)) * (xi1^2 + xi2^2)", 2, 2);
    std::vector<double> y, xi;
    for (int i = 0; i < 600; ++i) {
      y.push_back(i * 0.001);
      y.push_back(-i * 0.002);
      xi.push_back(std::cos(i));
      xi.push_back(std::sin(0.5 * i));
    }
    std::vector<double> out(600), grad(1200);
    const std::vector<double> x{0, 0};
    f.values(x, y.data(), xi.data(), 600, out.data());
    f.gradients(x, y.data(), xi.data(), 600, grad.data());
    for (std::size_t i = 0; i < 600; i += 37) {
      const std::span<const double> yi(y.data() + 2 * i, 2), xii(xi.data() + 2 * i, 2);
      CHECK(out[i] == f.value(x, yi, xii));
      const auto gi = f.gradient(x, yi, xii);
      CHECK(grad[2 * i] == gi[0]);
      CHECK(grad[2 * i + 1] == gi[1]);
    }
  }

  TEST_CASE("non-smooth xi dependence falls back to central differences") {
    const auto f = Integrand::parse("abs(xi1) + xi2^2", 2, 2);
    CHECK_FALSE(f.symbolic_gradient());
    CHECK_FALSE(f.gradient_warning().empty());
    const auto g = f.gradient(std::vector<double>{0, 0}, std::vector<double>{0, 0},
                              std::vector<double>{0.5, 1.0});
    CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(g[1] == doctest::Approx(2.0).epsilon(1e-6));
    // abs of a y-only argument keeps the symbolic path.
    CHECK(Integrand::parse("abs(sin(2*pi*y1)) * xi1^2", 2, 1).symbolic_gradient());
  }

  TEST_CASE("growth sampling") {
    const auto f = Integrand::parse("(xi1^2 - 1)^2 + xi2^2", 2, 2, 4, 4);
    const auto s = f.sample_growth(500, 9);
    CHECK(s.min_value >= 0.0);
    CHECK(s.max_ratio <= 4.0);
  }

  TEST_CASE("division by zero surfaces as a numerical error") {
    const auto f = Integrand::parse("1 / xi1", 2, 1);
    CHECK_THROWS_AS(f.value(std::vector<double>{0, 0}, std::vector<double>{0, 0},
                            std::vector<double>{0.0}),
                    NumericalError);
  }
}
