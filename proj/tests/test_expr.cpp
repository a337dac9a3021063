#include <doctest.h>

#include <cmath>
#include <random>

#include "aqx/errors.hpp"
#include "aqx/expr.hpp"
#include "aqx/program.hpp"
#include "helpers.hpp"

using namespace aqx;

namespace {

double eval(const std::string& text, std::vector<double> x = {}, std::vector<double> y = {},
            std::vector<double> xi = {}) {
  return Expr::parse(text).eval({x, y, xi});
}

std::size_t syntax_offset(const std::string& text) {
  try {
    Expr::parse(text);
  } catch (const SyntaxError& e) {
    return e.offset();
  }
  return std::string::npos;
}

}  // namespace

TEST_SUITE("expr") {
  TEST_CASE("arithmetic, precedence and functions") {
    CHECK(eval("1 + 2*3") == 7.0);
    CHECK(eval("2^3^2") == 512.0);
    CHECK(eval("-2^2") == -4.0);
    CHECK(eval("(-2)^2") == 4.0);
    CHECK(eval("2^-1") == 0.5);
    CHECK(eval("8/4/2") == 1.0);
    CHECK(eval("min(3, 1, 2) + max(1, 5)") == 6.0);
    CHECK(eval("abs(-1.5e1)") == 15.0);
    CHECK(eval("exp(0) + cos(0) + sin(pi/2)") == doctest::Approx(3.0));
    CHECK(eval("x1*y2 + xi3", {2.0}, {0.0, 3.0}, {0.0, 0.0, 1.0}) == 7.0);
    CHECK(eval("0.5 + 0.25*(1+sin(2*pi*x1))/2", {0.25}) == doctest::Approx(0.75));
  }

  TEST_CASE("errors carry offsets and kinds") {
    CHECK(syntax_offset("xi1^") == 4);
    CHECK(syntax_offset("1 + * 2") == 4);
    CHECK(syntax_offset("x1^1.5") == 3);
    CHECK(syntax_offset("sin(x1") == 6);
    CHECK_THROWS_AS(Expr::parse("foo(x1)"), ConfigError);
    CHECK_THROWS_AS(Expr::parse("x4"), ConfigError);
    CHECK_THROWS_AS(eval("y1"), ConfigError);
    CHECK_THROWS_AS(eval("1/(x1-x1)", {1.0}), NumericalError);
  }

  TEST_CASE("print round trips") {
    for (const char* s : {"-x1^2 + 3*sin(2*pi*y1)/(1 + xi1^2)", "max(xi1, -xi2, 0.5)^-2",
                          "exp(-(x1 - 0.5)^2) * abs(xi2)"}) {
      const auto e = Expr::parse(s);
      const auto again = Expr::parse(e.print());
      CHECK(again.print() == e.print());
      const std::vector<double> x{0.3}, y{0.1}, xi{0.7, -1.2};
      CHECK(again.eval({x, y, xi}) == e.eval({x, y, xi}));
    }
  }

  TEST_CASE("symbolic derivatives agree with central differences") {
    const auto e = Expr::parse("(xi1^2 + xi2^2 - 1)^2 * (2 + sin(2*pi*y1)) + exp(xi1*x1)/(1 + xi2^2)");
    const auto grad = e.grad_xi(2);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int k = 0; k < 20; ++k) {
      std::vector<double> x{u(rng)}, y{u(rng)}, xi{u(rng), u(rng)};
      for (int c = 0; c < 2; ++c) {
        const double h = 1e-6;
        auto p = xi, m = xi;
        p[static_cast<std::size_t>(c)] += h;
        m[static_cast<std::size_t>(c)] -= h;
        const double fd = (e.eval({x, y, p}) - e.eval({x, y, m})) / (2 * h);
        const double sym = grad[static_cast<std::size_t>(c)].eval({x, y, xi});
        CHECK(std::abs(sym - fd) <= 1e-5 * std::max(1.0, std::abs(sym)));
      }
    }
    CHECK_THROWS_AS(Expr::parse("abs(xi1)").grad_xi(1), NumericalError);
    CHECK(Expr::parse("abs(x1) * xi1").grad_xi(1)[0].eval({std::vector<double>{-2.0}, {}, {}}) == 2.0);
  }

  TEST_CASE("dependence queries and y bandwidth") {
    const auto e = Expr::parse("(2 + sin(2*pi*y1) * cos(4*pi*y2)) * xi1^2");
    CHECK(e.depends_on(expr::VarKind::y));
    CHECK_FALSE(e.depends_on(expr::VarKind::x));
    CHECK(e.max_index(expr::VarKind::y) == 2);
    REQUIRE(e.y_bandwidth().has_value());
    CHECK(*e.y_bandwidth() >= 2.0);
    CHECK_FALSE(Expr::parse("exp(y1)").y_bandwidth().has_value());
    CHECK(Expr::parse("3 * 4").is_constant());
  }

  TEST_CASE("compiled programs match tree evaluation") {
    const auto e = Expr::parse("x1 * (xi1^2 + xi2^2 - 1)^2 / (1 + y1^2) - max(xi1, y2) + abs(xi2)^3");
    const Program prog(e);
    constexpr std::size_t n = 700;  // spans several blocks
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2, 2);
    std::vector<double> y(2 * n), xi(2 * n), out(n);
    for (auto& v : y) v = u(rng);
    for (auto& v : xi) v = u(rng);
    const std::vector<double> x{0.4};
    prog.run({x, y.data(), 2, 2, xi.data(), 2, 2, n}, out);
    for (std::size_t i = 0; i < n; ++i) {
      const double ref = e.eval({x, std::span<const double>(y.data() + 2 * i, 2),
                                 std::span<const double>(xi.data() + 2 * i, 2)});
      CHECK(out[i] == doctest::Approx(ref).epsilon(1e-14));
    }
  }
}
