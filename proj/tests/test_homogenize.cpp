#include <doctest.h>

#include "aqx/errors.hpp"
#include "aqx/homogenize.hpp"
#include "helpers.hpp"

using namespace aqx;
using testing::kTwoPi;

namespace {
EnvelopeOptions opts(int m) {
  EnvelopeOptions o;
  o.micro = {m, m};
  o.random_starts = 2;
  return o;
}
}  // namespace

TEST_SUITE("homogenize") {
  TEST_CASE("replicate compresses one period into 1/k") {
    const Grid g = Grid::cube(2, 8);
    const auto w = testing::sample(g, 1, [](const double* y, double* v) {
      v[0] = std::sin(kTwoPi * y[0]) + std::cos(kTwoPi * y[1]);
    });
    const auto r = replicate(w, 2);
    CHECK(r.grid().dims(0) == 16);
    const auto ref = testing::sample(r.grid(), 1, [](const double* y, double* v) {
      v[0] = std::sin(2 * kTwoPi * y[0]) + std::cos(2 * kTwoPi * y[1]);
    });
    CHECK(testing::max_abs_diff(r, ref) < 1e-13);
  }

  TEST_CASE("cell problem argument checks") {
    const Operator op(divergence_perturbed("1"));
    const auto f = Integrand::parse("(2 + sin(2*pi*y1)) * (xi1^2 + xi2^2)", 2, 2);
    const std::vector<double> x{0, 0}, xi{1, 1};
    CHECK_THROWS_AS(cell_problem(op, f, x, xi, 3, opts(8)), ConfigError);
    const auto sharp = Integrand::parse("(2 + sin(16*pi*y1)) * (xi1^2 + xi2^2)", 2, 2);
    try {
      cell_problem(op, sharp, x, xi, 1, opts(16));
      FAIL("expected UnresolvableIntegrand");
    } catch (const ConfigError& e) {
      CHECK(e.code() == "UnresolvableIntegrand");
    }
  }

  TEST_CASE("trace over scales is non-increasing") {
    const Operator op(divergence_perturbed("1"));
    const auto f = Integrand::parse("(2 + sin(2*pi*y1)) * (xi1^2 + xi2^2)", 2, 2);
    const std::vector<double> x{0, 0}, xi{1, 1};
    const auto t = fhom(op, f, x, xi, 4, opts(8));
    REQUIRE(t.n_list == std::vector<int>{1, 2, 4});
    for (std::size_t i = 1; i < t.values.size(); ++i)
      CHECK(t.values[i] <= t.values[i - 1] + 1e-9);
    CHECK(t.fhom_estimate == t.values.back());
    // Laminating across y1 harmonizes the coefficient in the xi1 direction
    // and averages it in xi2: 1 / mean(1 / a) + mean(a) = sqrt(3) + 2.
    CHECK(t.fhom_estimate == doctest::Approx(2 + std::sqrt(3.0)).epsilon(1e-4));
  }

  TEST_CASE("y-independent integrands give a flat trace") {
    const Operator op(divergence_perturbed("1"));
    const auto f = Integrand::parse("(xi1^2 - 1)^2 + xi2^2", 2, 2, 4, 4);
    const std::vector<double> x{0, 0}, xi{0.5, 0.25};
    const auto t = fhom(op, f, x, xi, 4, opts(16));
    for (double v : t.values) CHECK(v == t.values.front());
  }

  TEST_CASE("membership of macro and two-scale fields") {
    const Operator op(divergence_perturbed("1"));
    const Grid macro = Grid::cube(2, 8, Domain::macro);
    const auto free_u = testing::sample(macro, 2, [](const double* x, double* v) {
      v[0] = std::sin(kTwoPi * x[1]);
      v[1] = 1.0;
    });
    CHECK(membership_check(op, free_u).pass);
    const auto bad_u = testing::sample(macro, 2, [](const double* x, double* v) {
      v[0] = std::cos(kTwoPi * x[0]);
      v[1] = 0.0;
    });
    CHECK_FALSE(membership_check(op, bad_u).pass);

    const Grid micro = Grid::cube(2, 8);
    TwoScaleField good(macro, micro, 2), bad(macro, micro, 2);
    double y[2];
    for (std::size_t j = 0; j < macro.size(); ++j)
      for (std::size_t k = 0; k < micro.size(); ++k) {
        micro.coords(k, y);
        good.at(j, k, 1) = std::sin(kTwoPi * y[0]);
        bad.at(j, k, 0) = std::sin(kTwoPi * y[0]);
      }
    CHECK(membership_check(op, good, FieldClass::W).pass);
    const auto r = membership_check(op, bad, FieldClass::W);
    CHECK_FALSE(r.pass);
    CHECK(r.ay_residual > 1e-3);
  }

  TEST_CASE("homogenized energy") {
    const Operator op(divergence_perturbed("1"));
    const auto f = Integrand::parse("xi1^2 + xi2^2", 2, 2);
    const Grid macro = Grid::cube(2, 4, Domain::macro);
    const auto u = testing::sample(macro, 2, [](const double*, double* v) {
      v[0] = 0.0;
      v[1] = 1.0;
    });
    const auto r = ehom(op, f, u, 2, opts(8));
    CHECK(r.feasible);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.n_list == std::vector<int>{1, 2});

    const auto bad = testing::sample(macro, 2, [](const double* x, double* v) {
      v[0] = std::cos(kTwoPi * x[0]);
      v[1] = 0.0;
    });
    CHECK_FALSE(ehom(op, f, bad, 2, opts(8)).feasible);
  }
}
