#include <doctest.h>

#include "aqx/errors.hpp"
#include "aqx/operator.hpp"
#include "aqx/projection.hpp"
#include "helpers.hpp"

using namespace aqx;
using testing::kTwoPi;

TEST_SUITE("operator") {
  TEST_CASE("perturbed divergence with a = 1/2 at lambda = (1, 0)") {
    const Operator op(divergence_perturbed("1/2"));
    const std::vector<double> x{0.3, 0.7}, lam{1.0, 0.0};
    const Matrix s = op.symbol(x, lam);
    CHECK(s(0, 0) == 0.5);
    CHECK(s(0, 1) == 0.0);
    const Matrix P = op.kernel_projector(x, lam);
    CHECK(std::abs(P(0, 0)) < 1e-14);
    CHECK(std::abs(P(1, 1) - 1.0) < 1e-14);
    CHECK(std::abs(P(0, 1)) < 1e-14);
    const Matrix Q = op.pseudo_q(x, lam);
    CHECK(std::abs(Q(0, 0) - 2.0) < 1e-13);
    CHECK(std::abs(Q(1, 0)) < 1e-13);
    CHECK(op.reference_rank() == 1);
  }

  TEST_CASE("Q inverts the symbol on the complement of the kernel and is (-1)-homogeneous") {
    const Operator op(divergence_perturbed("3/4 + sin(2*pi*x1)/4"));
    const std::vector<double> x{0.1, 0.2};
    for (const auto& lam : std::vector<std::vector<double>>{{1, 2}, {-3, 1}, {0.2, -0.7}}) {
      const Matrix P = op.kernel_projector(x, lam);
      const Matrix Q = op.pseudo_q(x, lam);
      const Matrix A = op.symbol(x, lam);
      const Matrix I = Matrix::Identity(2, 2);
      CHECK((Q * A - (I - P)).norm() < 1e-12);
      CHECK((A * P).norm() < 1e-12);
      CHECK((P * P - P).norm() < 1e-12);
      std::vector<double> twice{2 * lam[0], 2 * lam[1]};
      CHECK((op.pseudo_q(x, twice) - 0.5 * Q).norm() < 1e-12);
    }
  }

  TEST_CASE("curl-type operator: kernel span(lambda) and computed rank") {
    const Operator op(curl_perturbed("1"));
    const std::vector<double> x{0.0, 0.0}, lam{1.0, 0.0};
    const Matrix P = op.kernel_projector(x, lam);
    CHECK(std::abs(P(0, 0) - 1.0) < 1e-13);
    CHECK(std::abs(P(1, 1)) < 1e-13);
    // The displayed kernel is one-dimensional in R^2, so the rank is 1.
    CHECK(op.reference_rank() == 1);
    CHECK(op.l() == 4);
  }

  TEST_CASE("constant-rank gate") {
    const Operator div(divergence_perturbed("3/4 + sin(2*pi*x1)/4"));
    const auto dirs = default_directions(2, 16, 3);
    CHECK(dirs.size() > 16);
    for (const auto& d : dirs) CHECK(std::hypot(d[0], d[1]) == doctest::Approx(1.0));
    CHECK(check_constant_rank(div, {{0.1, 0.2}, {0.5, 0.5}, {0.9, 0.4}}, dirs) == 1);

    OperatorSpec bad;
    bad.N = 2;
    bad.d = 2;
    bad.l = 1;
    bad.coeffs = {{Expr::constant(1), Expr::constant(0)}, {Expr::constant(1), Expr::constant(0)}};
    const Operator op(bad);
    try {
      check_constant_rank(op, {{0.0, 0.0}}, dirs);
      FAIL("rank drop not detected");
    } catch (const ConstantRankViolation& e) {
      CHECK(e.observed_rank() == 0);
      CHECK(e.expected_rank() == 1);
      CHECK(std::abs(e.lambda()[0] + e.lambda()[1]) < 1e-12);
    }
    // The same drop surfaces when a projector table is built over a grid.
    CHECK_THROWS_AS(PointProjector(op, std::vector<double>{0.0, 0.0}, Grid::cube(2, 8)),
                    ConstantRankViolation);

    OperatorSpec vanishing = divergence_perturbed("x1 - 1/2");
    const Operator v(vanishing);
    CHECK_THROWS_AS(check_constant_rank(v, {{0.5, 0.5}}, {{1.0, 0.0}}), ConstantRankViolation);
  }

  TEST_CASE("coefficients must depend on x only") {
    CHECK_THROWS_AS(Operator(divergence_perturbed("1 + y1")), ConfigError);
    CHECK_THROWS_AS(Operator(divergence_perturbed("1 + x3")), ConfigError);
  }

  TEST_CASE("periodicity defect") {
    CHECK(Operator(divergence_perturbed("2 + cos(2*pi*x2)")).periodicity_defect({{0.2, 0.3}}) < 1e-12);
    const std::vector<std::vector<double>> base{{1, 0}, {0, 1}};
    CHECK(Operator(scaled_constant("1 + x1^2", 1, 2, base)).periodicity_defect({{0.2, 0.3}}) > 0.5);
  }

  TEST_CASE("projector tables are conjugation symmetric") {
    const Operator op(divergence_perturbed("3/4 + sin(2*pi*x1)/4"));
    const Grid g = Grid::cube(2, 8);
    const PointProjector pp(op, std::vector<double>{0.2, 0.6}, g);
    int f[2], n[2];
    for (std::size_t s = 1; s < g.size(); ++s) {
      if (g.is_nyquist(s)) {
        CHECK_FALSE(pp.active(s));
        continue;
      }
      g.frequency(s, f);
      n[0] = -f[0];
      n[1] = -f[1];
      const auto partner = g.slot_of(std::span<const int>(n, 2));
      CHECK((pp.P(s) - pp.P(partner)).norm() == 0.0);
      CHECK((pp.Q(s) + pp.Q(partner)).norm() < 1e-15);
    }
  }

  TEST_CASE("A_y of a plane wave and the macro operator") {
    const Operator op(divergence_perturbed("1/2"));
    const Grid g = Grid::cube(2, 16);
    // w = (sin(2 pi y1), cos(2 pi y2)): A_y w = 1/2 * 2 pi cos(2 pi y1) - 2 pi sin(2 pi y2)
    const auto w = testing::sample(g, 2, [](const double* y, double* v) {
      v[0] = std::sin(kTwoPi * y[0]);
      v[1] = std::cos(kTwoPi * y[1]);
    });
    const auto ref = testing::sample(g, 1, [](const double* y, double* v) {
      v[0] = 0.5 * kTwoPi * std::cos(kTwoPi * y[0]) - kTwoPi * std::sin(kTwoPi * y[1]);
    });
    CHECK(testing::max_abs_diff(apply_Ay(op, std::vector<double>{0, 0}, w), ref) < 1e-12);

    const Operator var(divergence_perturbed("1 + x2/4"));
    const Grid m = Grid::cube(2, 16, Domain::macro);
    const auto u = testing::sample(m, 2, [](const double* x, double* v) {
      v[0] = std::sin(kTwoPi * x[0]);
      v[1] = 0.0;
    });
    const auto mref = testing::sample(m, 1, [](const double* x, double* v) {
      v[0] = (1 + x[1] / 4) * kTwoPi * std::cos(kTwoPi * x[0]);
    });
    CHECK(testing::max_abs_diff(apply_A_macro(var, u), mref) < 1e-11);
  }

  TEST_CASE("deficiency constants") {
    const Grid g = Grid::cube(2, 16);
    // C = max over unit lambda of 1 / |(a lambda1, lambda2)| = 1 / a
    CHECK(deficiency_bound(Operator(divergence_perturbed("1/2")), std::vector<double>{0, 0}, g) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(deficiency_bound(Operator(divergence_perturbed("1")), std::vector<double>{0, 0}, g) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(effective_constant(1.0) == doctest::Approx(std::sqrt(1 + kTwoPi * kTwoPi) / kTwoPi));
  }
}
