#include <benchmark/benchmark.h>

#include "qpstrip/cocycle.hpp"
#include "qpstrip/measures.hpp"

using namespace qps;

namespace {

Exec mode(const benchmark::State& st) { return st.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_ids(benchmark::State& st) {
  OperatorSpec op = OperatorSpec::amo(2.0, kGolden, 0.0);
  auto grid = linspace(-4.5, 4.5, 91);
  for (auto _ : st) benchmark::DoNotOptimize(ids(op, grid, 1024, 16, mode(st)).N.back());
}

void BM_lyapunov(benchmark::State& st) {
  Cocycle c = schrodinger_cocycle(StripSpec::amo(2.0, kGolden), 0.5);
  for (auto _ : st) benchmark::DoNotOptimize(lyapunov_spectrum(c, 5000, 16, -1, mode(st)).exponents[0]);
}

void BM_strip_lyapunov(benchmark::State& st) {
  StripSpec s = fold_to_strip(OperatorSpec::amo(1.0, kGolden, 0.0));
  Cocycle c = schrodinger_cocycle(s, 0.3);
  for (auto _ : st) benchmark::DoNotOptimize(lyapunov_spectrum(c, 2000, 8, -1, mode(st)).spread);
}

}  // namespace

// Arg 0 is the serial reference, arg 1 the OpenMP path.
BENCHMARK(BM_ids)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_lyapunov)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_strip_lyapunov)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
