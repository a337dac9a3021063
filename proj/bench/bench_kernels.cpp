// Serial reference against the OpenMP path for the node-parallel kernels.
// Run with OMP_NUM_THREADS set to the core count of interest.

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "aqx/envelope.hpp"
#include "aqx/projection.hpp"
#include "aqx/twoscale.hpp"

namespace {

using namespace aqx;

const Operator& divergence() {
  static const Operator op(divergence_perturbed("3/4 + sin(2*pi*x1)/4"));
  return op;
}

Exec exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Exec::serial : Exec::parallel;
}

TwoScaleField wavy(int macro, int micro) {
  const Grid mg = Grid::cube(2, macro, Domain::macro);
  const Grid cg = Grid::cube(2, micro);
  TwoScaleField w(mg, cg, 2);
  double x[2], y[2];
  for (std::size_t j = 0; j < mg.size(); ++j) {
    mg.coords(j, x);
    for (std::size_t k = 0; k < cg.size(); ++k) {
      cg.coords(k, y);
      const double t = 2 * std::numbers::pi * (y[0] + 2 * y[1]);
      w.at(j, k, 0) = std::cos(t) * (1 + x[0]);
      w.at(j, k, 1) = std::sin(t) + 0.1 * x[1];
    }
  }
  return w;
}

void BM_ProjectTwoScale(benchmark::State& state) {
  const auto w = wavy(16, 32);
  for (auto _ : state) benchmark::DoNotOptimize(project_two_scale(divergence(), w, exec_of(state)));
}
BENCHMARK(BM_ProjectTwoScale)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_GenerateSequence(benchmark::State& state) {
  const auto w = project_two_scale(divergence(), wavy(8, 16), Exec::serial);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        generate_sequence(divergence(), w, {4, 8}, Grid::cube(2, 128, Domain::macro), 1e-7,
                          exec_of(state)));
}
BENCHMARK(BM_GenerateSequence)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EnvelopeField(benchmark::State& state) {
  const auto f = Integrand::parse("(xi1^2 + xi2^2 - 1)^2", 2, 2, 4, 4);
  const Grid mg = Grid::cube(2, 4, Domain::macro);
  PeriodicField u(mg, 2);
  double x[2];
  for (std::size_t j = 0; j < mg.size(); ++j) {
    mg.coords(j, x);
    u.at(j, 0) = 0.5 * std::cos(2 * std::numbers::pi * x[0]);
    u.at(j, 1) = 0.25;
  }
  EnvelopeOptions opts;
  opts.micro = {16, 16};
  opts.random_starts = 2;
  for (auto _ : state)
    benchmark::DoNotOptimize(pointwise_envelope_field(divergence(), f, u, opts, exec_of(state)));
}
BENCHMARK(BM_EnvelopeField)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
