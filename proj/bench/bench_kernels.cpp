// Serial reference against the OpenMP kernels on the same inputs.
#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "vlw/exponent.hpp"
#include "vlw/grid.hpp"
#include "vlw/muckenhoupt.hpp"
#include "vlw/operators.hpp"
#include "vlw/parallel.hpp"

namespace {

vlw::Grid line(int m) {
  const double lo[1] = {0.0};
  const double hi[1] = {1.0};
  return vlw::make_uniform_grid(1, lo, hi, m);
}

void matrix_ap(benchmark::State& state, vlw::Execution exec) {
  const vlw::Grid g = line(static_cast<int>(state.range(0)));
  const auto p = vlw::ExponentFunction::from_function(g, [](const vlw::Point& x) { return 1.5 + x[0]; });
  const auto w = vlw::make_rotating_weight(
      g, [](const vlw::Point& x) { return std::numbers::pi * x[0]; }, 0.5, -0.3);
  const auto fam = vlw::dyadic_levels(g, 0, 3, true);
  for (auto _ : state) benchmark::DoNotOptimize(vlw::matrix_ap_constant(w, p, fam, exec).supremum);
}

void mollify(benchmark::State& state, vlw::Execution exec) {
  const double lo[2] = {0.0, 0.0};
  const double hi[2] = {1.0, 1.0};
  const vlw::Grid g = vlw::make_uniform_grid(2, lo, hi, static_cast<int>(state.range(0)));
  const auto f = vlw::ScalarField::from_function(g, [](const vlw::Point& x) { return std::sin(7.0 * x[0]) * x[1]; });
  const auto k = vlw::make_mollifier(g, 0.08);
  for (auto _ : state) benchmark::DoNotOptimize(vlw::convolve(f, k, exec).values.data());
}

}  // namespace

BENCHMARK_CAPTURE(matrix_ap, serial, vlw::Execution::serial)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(matrix_ap, parallel, vlw::Execution::parallel)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(mollify, serial, vlw::Execution::serial)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(mollify, parallel, vlw::Execution::parallel)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
