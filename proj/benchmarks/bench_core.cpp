#include <benchmark/benchmark.h>

#include <random>

#include "hlab/diagnostics.hpp"

using namespace hlab;

namespace {

SchemeConfig generalized(std::size_t n) {
  SchemeConfig c;
  c.kind = SchemeKind::generalized;
  c.horizon = n;
  c.x0 = (Point(2) << 2, 1).finished();
  c.schedules.alpha = Schedule::power_law(0.01, 1);
  c.schedules.beta = Schedule::constant(0.5);
  c.schedules.delta = Schedule::power_law(0.1, 2);
  c.f = ContractionMap(LipschitzMap::affine(0.5 * Matrix::Identity(2, 2), Point::Zero(2)));
  c.family = MapFamily(LipschitzMap::affine(0.6 * Matrix::Identity(2, 2), (Point(2) << 1, 0).finished()),
                       LipschitzMap::constant((Point(2) << 0.2, 0.1).finished()), Schedule::geometric(1, 0.9));
  return c;
}

void BM_RunGeneralized(benchmark::State& state) {
  const SchemeConfig c = generalized(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run(c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunGeneralized)->Arg(1000)->Arg(10000);

void BM_RunCoupled(benchmark::State& state) {
  SchemeConfig c = generalized(static_cast<std::size_t>(state.range(0)));
  c.kind = SchemeKind::coupled_aux;
  for (auto _ : state) benchmark::DoNotOptimize(run(c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunCoupled)->Arg(10000);

void BM_ClosedForm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> beta(n), z(n);
  for (std::size_t k = 0; k < n; ++k) beta[k] = u(rng), z[k] = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(closed_form_solution(beta, z, 1.0, n));
}
BENCHMARK(BM_ClosedForm)->Arg(50)->Arg(1000)->Arg(100000);

void BM_EstimateLipschitz(benchmark::State& state) {
  const auto f = LipschitzMap::affine((Matrix(2, 2) << 0.3, 0, 0, 0.8).finished(), Point::Zero(2));
  const AmbientSpace C = AmbientSpace::ball(Point::Zero(2), 3.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_lipschitz(f, C, static_cast<std::size_t>(state.range(0)), 0));
  }
}
BENCHMARK(BM_EstimateLipschitz)->Arg(64)->Arg(512);

void BM_Telescoping(benchmark::State& state) {
  const Trajectory t = run(generalized(10000)).main;
  for (auto _ : state) benchmark::DoNotOptimize(check_telescoping(t, 1e-8));
}
BENCHMARK(BM_Telescoping);

}  // namespace

BENCHMARK_MAIN();
