// Serial reference versus OpenMP kernels on the same inputs.

#include <benchmark/benchmark.h>

#include "qpz/divisor.hpp"
#include "qpz/generators.hpp"
#include "qpz/kernels.hpp"
#include "qpz/zero_finder.hpp"

using namespace qpz;

namespace {

Exec mode(const benchmark::State& s) { return s.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

void label(benchmark::State& s) { s.SetLabel(s.range(0) == 0 ? "serial" : "parallel"); }

void BM_EvalGrid(benchmark::State& s) {
  const Quasipolynomial q = random_quasipolynomial(12, 4.0, 1);
  const Grid g = Grid::covering(StripWindow(-2, 2, 0, 100), 0.02);
  for (auto _ : s) benchmark::DoNotOptimize(eval_grid(q, g, mode(s)));
  s.SetItemsProcessed(static_cast<std::int64_t>(s.iterations() * g.size()));
  label(s);
}

void BM_AlmostPeriodScan(benchmark::State& s) {
  const Divisor z = example2(AlphaTag::Sqrt2, 300.0);
  const StripWindow inner(-0.85, 0.85, -100, 100);
  for (auto _ : s) benchmark::DoNotOptimize(scan_almost_periods(z, 0.05, inner, 150.0, 0.0125, mode(s)));
  label(s);
}

void BM_FindZeros(benchmark::State& s) {
  const Quasipolynomial q = random_quasipolynomial(6, 3.0, 42);
  FindOptions o;
  o.exec = mode(s);
  for (auto _ : s) benchmark::DoNotOptimize(find_zeros(q, StripWindow(-3, 3, 0, 200), o));
  label(s);
}

}  // namespace

BENCHMARK(BM_EvalGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_AlmostPeriodScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FindZeros)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
