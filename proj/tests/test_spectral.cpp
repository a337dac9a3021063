#include <doctest.h>

#include <complex>

#include "aqx/errors.hpp"
#include "aqx/spectral.hpp"
#include "helpers.hpp"

using namespace aqx;
using testing::kTwoPi;

TEST_SUITE("spectral") {
  TEST_CASE("grid nodes, frequencies and slots") {
    const Grid cell = Grid::cube(2, 8);
    CHECK(cell.size() == 64);
    CHECK(cell.coord(0, 0) == doctest::Approx(-0.5));
    CHECK(cell.coord(1, 3) == doctest::Approx(-0.125));
    const Grid macro = Grid::cube(2, 8, Domain::macro);
    CHECK(macro.coord(0, 3) == doctest::Approx(0.375));
    int f[2];
    for (std::size_t s = 0; s < cell.size(); ++s) {
      cell.frequency(s, f);
      CHECK(cell.slot_of(std::span<const int>(f, 2)) == s);
      CHECK(cell.is_nyquist(s) == (f[0] == -4 || f[1] == -4));
    }
    CHECK_THROWS_AS(Grid(std::vector<int>{6, 5}), ConfigError);
  }

  TEST_CASE("forward transform matches a direct DFT with true coordinates") {
    const Grid g = Grid::cube(2, 8);
    const auto u = testing::random_modes(g, 1, 3, 7);
    const auto spec = forward_transform(u);
    double x[2];
    for (int l1 : {-3, 0, 2})
      for (int l2 : {-1, 1, 3}) {
        std::complex<double> ref = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) {
          g.coords(j, x);
          ref += u.at(j, 0) * std::polar(1.0, -kTwoPi * (l1 * x[0] + l2 * x[1]));
        }
        ref /= static_cast<double>(g.size());
        const int lam[2] = {l1, l2};
        CHECK(std::abs(spec.at(std::span<const int>(lam, 2), 0) - ref) < 1e-13);
      }
  }

  TEST_CASE("cos(2 pi y1) has coefficients 1/2 at lambda = (+-1, 0)") {
    const Grid g = Grid::cube(2, 16);
    const auto u = testing::sample(g, 1, [](const double* y, double* v) { v[0] = std::cos(kTwoPi * y[0]); });
    const auto spec = forward_transform(u);
    const int p[2] = {1, 0}, m[2] = {-1, 0}, o[2] = {0, 1};
    CHECK(std::abs(spec.at(std::span<const int>(p, 2), 0) - 0.5) < 1e-14);
    CHECK(std::abs(spec.at(std::span<const int>(m, 2), 0) - 0.5) < 1e-14);
    CHECK(std::abs(spec.at(std::span<const int>(o, 2), 0)) < 1e-14);
  }

  TEST_CASE("round trip and non-symmetric spectra") {
    const Grid g = Grid::cube(2, 12);
    const auto u = testing::random_modes(g, 2, 4, 3);
    const auto back = inverse_transform(forward_transform(u));
    CHECK(testing::max_abs_diff(u, back) < 1e-13);
    Spectrum s(g, 1);
    const int lam[2] = {1, 0};
    s.at(g.slot_of(std::span<const int>(lam, 2)), 0) = 1.0;
    CHECK_THROWS_AS(inverse_transform(s), NumericalError);
    CHECK_NOTHROW(inverse_transform(s, ImagPolicy::discard));
  }

  TEST_CASE("norms of sin(2 pi y1)") {
    const Grid g = Grid::cube(2, 32);
    const auto u = testing::sample(g, 1, [](const double* y, double* v) { v[0] = std::sin(kTwoPi * y[0]); });
    CHECK(lp_norm(u, 2.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(lp_norm(u, 4.0) == doctest::Approx(std::pow(3.0 / 8.0, 0.25)).epsilon(1e-12));
    // |g^(+-1)|^2 = 1/4 each, weight 1 / (1 + 4 pi^2)
    CHECK(hneg_norm(u) == doctest::Approx(std::sqrt(0.5 / (1.0 + kTwoPi * kTwoPi))).epsilon(1e-12));
    CHECK(hneg_norm(u) == doctest::Approx(0.11114).epsilon(1e-4));
  }

  TEST_CASE("trigonometric interpolation reproduces band-limited fields off the grid") {
    const Grid g = Grid::cube(2, 16);
    auto fn = [](const double* y, double* v) {
      v[0] = std::cos(kTwoPi * (2 * y[0] - y[1])) + 0.3 * std::sin(kTwoPi * 3 * y[1]);
    };
    const auto spec = forward_transform(testing::sample(g, 1, fn));
    const double pt[2] = {0.1234, -0.377};
    double val[1], ref[1];
    trig_interpolate(spec, pt, val);
    fn(pt, ref);
    CHECK(val[0] == doctest::Approx(ref[0]).epsilon(1e-12));
  }

  TEST_CASE("resampling onto a finer grid keeps band-limited values") {
    const Grid coarse = Grid::cube(2, 8, Domain::macro);
    const Grid fine = Grid::cube(2, 32, Domain::macro);
    auto fn = [](const double* x, double* v) { v[0] = 1.0 + std::sin(kTwoPi * (x[0] + 2 * x[1])); };
    const auto up = inverse_transform(resample_spectrum(forward_transform(testing::sample(coarse, 1, fn)), fine));
    CHECK(testing::max_abs_diff(up, testing::sample(fine, 1, fn)) < 1e-13);
  }

  TEST_CASE("remove_mean and field arithmetic") {
    const Grid g = Grid::cube(2, 8);
    auto u = testing::random_modes(g, 2, 2, 9);
    for (auto& v : u.values()) v += 3.0;
    const auto z = remove_mean(u);
    for (double m : z.mean()) CHECK(std::abs(m) < 1e-14);
    const auto w = 2.0 * z - z;
    CHECK(testing::max_abs_diff(w, z) < 1e-15);
  }
}
