#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "aqx/convex_oracle.hpp"
#include "aqx/errors.hpp"

using namespace aqx;

namespace {
double radial_well(std::span<const double> xi) {
  const double r2 = xi[0] * xi[0] + xi[1] * xi[1];
  return (r2 - 1) * (r2 - 1);
}

// Convex envelope of a radial profile g(r) increasing for r >= 1 and
// vanishing at r = 1: zero on the unit disk, g outside.
double radial_envelope(double r) { return r <= 1 ? 0.0 : (r * r - 1) * (r * r - 1); }
}  // namespace

TEST_SUITE("convex_oracle") {
  TEST_CASE("radial double well") {
    const std::vector<double> lo{-5, -5}, hi{5, 5};
    const auto t = convex_envelope_oracle(radial_well, lo, hi, 201);
    for (double r : {0.0, 0.5, 0.9, 1.3, 2.0}) {
      for (double th : {0.0, 0.7, 2.1}) {
        const std::vector<double> xi{r * std::cos(th), r * std::sin(th)};
        const double ref = radial_envelope(r);
        CHECK(std::abs(t.at(xi) - ref) <= 0.02 * ref + 0.01);
      }
    }
    const std::vector<double> two{2, 0};
    CHECK(t.at(two) == doctest::Approx(9.0).epsilon(1e-2));
  }

  TEST_CASE("convex input is reproduced at the nodes") {
    auto f = [](std::span<const double> xi) { return xi[0] * xi[0] + 0.5 * xi[1] * xi[1] + xi[0]; };
    const std::vector<double> lo{-2, -2}, hi{2, 2};
    const auto t = convex_envelope_oracle(f, lo, hi, 41);
    const std::vector<double> zero{0, 0}, p{1, -1};
    CHECK(std::abs(t.at(zero)) < 1e-12);
    CHECK(t.at(p) == doctest::Approx(2.5).epsilon(1e-12));
  }

  TEST_CASE("one-dimensional double well") {
    auto f = [](std::span<const double> xi) { return std::pow(xi[0] * xi[0] - 1, 2); };
    const std::vector<double> lo{-3}, hi{3};
    const auto t = convex_envelope_oracle(f, lo, hi, 601);
    for (double s : {-0.9, -0.3, 0.0, 0.6}) CHECK(std::abs(t.at(std::vector<double>{s})) < 1e-12);
    CHECK(t.at(std::vector<double>{1.5}) == doctest::Approx(f(std::vector<double>{1.5})).epsilon(1e-3));
  }

  TEST_CASE("concave input exhausts the box") {
    auto f = [](std::span<const double> xi) { return 10 - xi[0] * xi[0]; };
    const std::vector<double> lo{-1}, hi{1};
    CHECK_THROWS_AS(convex_envelope_oracle(f, lo, hi, 41), NumericalError);
  }
}
