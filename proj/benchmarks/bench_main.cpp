#include <benchmark/benchmark.h>

#include "species/numeric.hpp"
#include "species/solve.hpp"

using namespace species;

namespace {

const char* kCatalan = "T = Z * Seq(T);";
const char* kCayley = "G = Z * Set(G);";
const char* kSeriesParallel = "S = Seq(Z + P, card >= 2); P = Set(Z + S, card >= 2);";

void BM_MulRational(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  Series<Rat> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a.at(i) = Rat(static_cast<long>(i + 1), 3);
    b.at(i) = Rat(static_cast<long>(2 * i + 1), 7);
  }
  for (auto _ : state) benchmark::DoNotOptimize(mul(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MulRational)->RangeMultiplier(2)->Range(64, 2048)->Complexity();

void BM_MulInteger(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  Series<BigInt> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a.at(i) = BigInt(static_cast<long>(i * i + 1));
    b.at(i) = BigInt(static_cast<long>(3 * i + 2));
  }
  for (auto _ : state) benchmark::DoNotOptimize(mul(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MulInteger)->RangeMultiplier(2)->Range(64, 2048)->Complexity();

void BM_SeriesExp(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  Series<Rat> a(n);
  for (std::size_t i = 1; i < n; ++i) a.at(i) = Rat(1, static_cast<long>(i));
  for (auto _ : state) benchmark::DoNotOptimize(exp(a));
}
BENCHMARK(BM_SeriesExp)->RangeMultiplier(2)->Range(64, 1024);

void BM_CatalanOgfInt(benchmark::State& state) {
  SystemSpec sys = parse_system(kCatalan);
  std::size_t n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(newton_solve<BigInt>(sys, SeriesKind::OGF, n));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CatalanOgfInt)->RangeMultiplier(2)->Range(128, 4096)->Complexity();

void BM_CayleyOgfRational(benchmark::State& state) {
  SystemSpec sys = parse_system(kCayley);
  std::size_t n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(newton_solve<Rat>(sys, SeriesKind::OGF, n));
}
BENCHMARK(BM_CayleyOgfRational)->RangeMultiplier(2)->Range(64, 1024);

void BM_SeriesParallelEgf(benchmark::State& state) {
  SystemSpec sys = parse_system(kSeriesParallel);
  std::size_t n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(newton_solve<Rat>(sys, SeriesKind::EGF, n));
}
BENCHMARK(BM_SeriesParallelEgf)->RangeMultiplier(2)->Range(64, 512);

void BM_FixedPointReference(benchmark::State& state) {
  SystemSpec sys = parse_system(kCayley);
  std::size_t n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(joyal_solve<Rat>(sys, SeriesKind::OGF, n));
}
BENCHMARK(BM_FixedPointReference)->RangeMultiplier(2)->Range(16, 128);

void BM_NumericEgfValue(benchmark::State& state) {
  SystemSpec sys = parse_system(kCayley);
  for (auto _ : state) benchmark::DoNotOptimize(egf_value(sys, 0.2, 1e-14, 60));
}
BENCHMARK(BM_NumericEgfValue);

void BM_NumericOgfValue(benchmark::State& state) {
  SystemSpec sys = parse_system(kCayley);
  EvalRequest req;
  req.kind = SeriesKind::OGF;
  req.point = 0.3;
  req.eps = 1e-12;
  req.powers = 4;
  for (auto _ : state) benchmark::DoNotOptimize(ogf_value(sys, req));
}
BENCHMARK(BM_NumericOgfValue);

}  // namespace

BENCHMARK_MAIN();
