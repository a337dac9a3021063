#include <doctest.h>

#include "aqx/envelope.hpp"
#include "aqx/errors.hpp"
#include "aqx/projection.hpp"
#include "helpers.hpp"

using namespace aqx;

namespace {
EnvelopeOptions small_opts() {
  EnvelopeOptions o;
  o.micro = {16, 16};
  o.random_starts = 3;
  return o;
}
}  // namespace

TEST_SUITE("envelope") {
  TEST_CASE("convex integrand: the envelope equals f") {
    const Operator op(divergence_perturbed("3/4 + sin(2*pi*x1)/4"));
    const auto f = Integrand::parse("xi1^2 + 2*xi2^2 + xi1", 2, 2);
    const std::vector<double> x{0.2, 0.5}, xi{1.0, -0.5};
    const auto r = qa_envelope(op, f, x, xi, small_opts());
    CHECK(r.value == doctest::Approx(1 + 0.5 + 1).epsilon(1e-9));
    CHECK(r.value <= r.baseline + 1e-12);
  }

  TEST_CASE("double well relaxes to nearly zero between the wells") {
    const Operator op(divergence_perturbed("1"));
    const auto f = Integrand::parse("(xi1^2 - 1)^2 + xi2^2", 2, 2, 4, 4);
    const std::vector<double> x{0, 0}, xi{0, 0};
    auto opts = small_opts();
    opts.micro = {32, 32};
    const auto r = qa_envelope(op, f, x, xi, opts);
    CHECK(r.baseline == doctest::Approx(1.0));
    // The laminate between the wells costs O(1/M) on an M-point grid.
    CHECK(r.value < 0.05);
    CHECK(r.value >= 0.0);

    // The minimizer is a mean-zero free field.
    for (double m : r.minimizer.mean()) CHECK(std::abs(m) < 1e-12);
    const PointProjector pp(op, x, r.minimizer.grid());
    CHECK(testing::max_abs_diff(project(pp, r.minimizer), r.minimizer) < 1e-10);
  }

  TEST_CASE("same seed, same answer") {
    const Operator op(divergence_perturbed("3/4 + sin(2*pi*x1)/4"));
    const auto f = Integrand::parse("(xi1^2 - 1)^2 + (xi2^2 - 1/4)^2", 2, 2, 4, 4);
    const std::vector<double> x{0.3, 0.1}, xi{0.25, 0.1};
    const auto a = qa_envelope(op, f, x, xi, small_opts());
    const auto b = qa_envelope(op, f, x, xi, small_opts());
    CHECK(a.value == b.value);
    CHECK(a.starts.size() == b.starts.size());
    CHECK(a.starts.size() == 1 + 3);
    CHECK(std::equal(a.minimizer.values().begin(), a.minimizer.values().end(),
                     b.minimizer.values().begin()));
    CHECK(task_seed(1, 2, x, xi) == task_seed(1, 2, x, xi));
    CHECK(task_seed(1, 2, x, xi) != task_seed(1, 3, x, xi));
  }

  TEST_CASE("envelope field agrees with pointwise envelopes") {
    const Operator op(divergence_perturbed("3/4 + sin(2*pi*x1)/4"));
    const auto f = Integrand::parse("(xi1^2 - 1)^2 + xi2^2", 2, 2, 4, 4);
    const Grid macro = Grid::cube(2, 4, Domain::macro);
    const auto u = testing::sample(macro, 2, [](const double* x, double* v) {
      v[0] = 0.5 * std::cos(testing::kTwoPi * x[0]);
      v[1] = 0.25;
    });
    auto opts = small_opts();
    opts.random_starts = 2;
    const auto serial = pointwise_envelope_field(op, f, u, opts, Exec::serial);
    const auto parallel = pointwise_envelope_field(op, f, u, opts, Exec::parallel);
    CHECK(testing::max_abs_diff(serial.values, parallel.values) == 0.0);
    double x[2];
    for (std::size_t j : {0u, 5u, 11u}) {
      macro.coords(j, x);
      const std::vector<double> xi{u.at(j, 0), u.at(j, 1)};
      const auto r = qa_envelope(op, f, x, xi, opts);
      CHECK(std::abs(serial.values.at(j, 0) - r.value) < 1e-12);
    }
  }

  TEST_CASE("y-dependent integrands are rejected") {
    const Operator op(divergence_perturbed("1"));
    const auto f = Integrand::parse("(2 + sin(2*pi*y1)) * xi1^2", 2, 2);
    CHECK_THROWS_AS(qa_envelope(op, f, std::vector<double>{0, 0}, std::vector<double>{1, 0},
                                small_opts()),
                    ConfigError);
  }
}
