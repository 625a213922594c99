#include <benchmark/benchmark.h>

#include <vector>

#include "skewtorus/families.hpp"
#include "skewtorus/inference.hpp"
#include "skewtorus/numerics.hpp"
#include "skewtorus/skew.hpp"

namespace st = skewtorus;

namespace {

st::SkewModel model_for(st::Family f) {
  switch (f) {
    case st::Family::Sine:
      return {{0.5, -1.0}, st::FamilyParams::sine({2.0, 1.5}, {0.8}), {0.4, 0.3}};
    case st::Family::Cosine:
      return {{0.5, -1.0}, st::FamilyParams::cosine({2.0, 1.5}, {0.8}), {0.4, 0.3}};
    case st::Family::WrappedCauchy:
      return {{0.5, -1.0}, st::FamilyParams::wrapped_cauchy(0.5, 0.6, 0.4), {0.4, 0.3}};
    default:
      return {{0.0, 0.0}, st::FamilyParams::uniform(2), {0.4, 0.3}};
  }
}

void BM_LogBesselI(benchmark::State& state) {
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(st::numerics::log_bessel_i(static_cast<int>(state.range(0)), x));
    x = x > 500 ? 0.1 : x * 1.1;
  }
}
BENCHMARK(BM_LogBesselI)->Arg(0)->Arg(1)->Arg(5);

void BM_SineLogNormConst(benchmark::State& state) {
  const double r = static_cast<double>(state.range(0)) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(st::sine_log_norm_const(3.0, 2.0, r));
}
BENCHMARK(BM_SineLogNormConst)->Arg(0)->Arg(5)->Arg(25);

void BM_CosineLogNormConst(benchmark::State& state) {
  const double r = static_cast<double>(state.range(0)) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(st::cosine_log_norm_const(3.0, 2.0, r));
}
BENCHMARK(BM_CosineLogNormConst)->Arg(0)->Arg(5)->Arg(25);

void BM_LogDensity(benchmark::State& state) {
  const auto m = model_for(static_cast<st::Family>(state.range(0)));
  std::vector<double> x{0.3, 2.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.log_density(x));
    x[0] += 0.01;
  }
}
BENCHMARK(BM_LogDensity)->DenseRange(0, 3);

void BM_Sample(benchmark::State& state) {
  const auto m = model_for(static_cast<st::Family>(state.range(0)));
  st::Rng rng(7);
  for (auto _ : state) benchmark::DoNotOptimize(st::sample(m, 1000, rng));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_Sample)->DenseRange(0, 3);

void BM_FitSine(benchmark::State& state) {
  const auto m = model_for(st::Family::Sine);
  st::Rng rng(11);
  const auto data = st::sample(m, static_cast<std::size_t>(state.range(0)), rng);
  st::FitOptions opt;
  opt.n_starts = 2;
  opt.compute_covariance = false;
  for (auto _ : state) benchmark::DoNotOptimize(st::fit_mle(st::Family::Sine, true, data, opt));
}
BENCHMARK(BM_FitSine)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
