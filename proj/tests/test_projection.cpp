#include <doctest.h>

#include "aqx/operator.hpp"
#include "aqx/projection.hpp"
#include "helpers.hpp"

using namespace aqx;

TEST_SUITE("projection") {
  TEST_CASE("Pi is idempotent, kills constants and lands in ker A_y") {
    const Operator op(divergence_perturbed("3/4 + sin(2*pi*x1)/4"));
    const Grid g = Grid::cube(2, 32);
    const std::vector<double> x{0.15, 0.4};
    const PointProjector pp(op, x, g);
    for (unsigned seed = 1; seed <= 5; ++seed) {
      const auto psi = testing::random_modes(g, 2, 6, seed);
      const auto p1 = project(pp, psi);
      const auto p2 = project(pp, p1);
      CHECK(testing::max_abs_diff(p1, p2) < 1e-13);
      CHECK(hneg_norm(apply_Ay(pp.frozen(), p1)) < 1e-12);
      for (double m : p1.mean()) CHECK(std::abs(m) < 1e-14);
      // Orthogonal projection never increases the L2 norm.
      CHECK(lp_norm(p1, 2) <= lp_norm(psi, 2) + 1e-14);
    }
    PeriodicField c(g, 2);
    for (std::size_t j = 0; j < g.size(); ++j) {
      c.at(j, 0) = 1.5;
      c.at(j, 1) = -2.0;
    }
    CHECK(lp_norm(project(pp, c), 2) < 1e-15);
  }

  TEST_CASE("free fields pass through unchanged") {
    // For a = 1/2 the kernel at lambda is span(-lambda2, lambda1 / 2).
    const Operator op(divergence_perturbed("1/2"));
    const Grid g = Grid::cube(2, 16);
    const auto w = testing::sample(g, 2, [](const double* y, double* v) {
      const double t = testing::kTwoPi * (y[0] + 2 * y[1]);
      v[0] = -2 * std::cos(t);
      v[1] = 0.5 * std::cos(t);
    });
    CHECK(testing::max_abs_diff(project(op, std::vector<double>{0, 0}, w), w) < 1e-13);
  }

  TEST_CASE("projection report: certified defect bound at p = 2") {
    const Operator op(divergence_perturbed("3/4 + sin(2*pi*x1)/4"));
    const Grid g = Grid::cube(2, 32);
    const PointProjector pp(op, std::vector<double>{0.3, 0.1}, g);
    const auto psi = testing::random_modes(g, 2, 8, 42);
    const auto r = projection_report(pp, psi);
    CHECK(r.bound_status == "certified");
    CHECK(r.rank == 1);
    CHECK(r.idempotency_gap < 1e-13);
    CHECK(r.residual < 1e-12);
    CHECK(r.defect_lhs <= r.defect_rhs * (1 + 1e-10));
    CHECK(projection_report(pp, psi, 4.0).bound_status == "indicative");
  }

  TEST_CASE("two-scale projection: serial and parallel agree bit for bit") {
    const Operator op(divergence_perturbed("3/4 + sin(2*pi*x1)/4"));
    const Grid macro = Grid::cube(2, 4, Domain::macro);
    const Grid micro = Grid::cube(2, 16);
    TwoScaleField w(macro, micro, 2);
    for (std::size_t j = 0; j < macro.size(); ++j)
      w.set_slice(j, testing::random_modes(micro, 2, 4, static_cast<unsigned>(j + 7)));
    const auto a = project_two_scale(op, w, Exec::serial);
    const auto b = project_two_scale(op, w, Exec::parallel);
    REQUIRE(a.values().size() == b.values().size());
    CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
    double x[2];
    macro.coords(5, x);
    const auto direct = project(op, x, w.slice(5));
    CHECK(testing::max_abs_diff(direct, a.slice(5)) == 0.0);
  }
}
