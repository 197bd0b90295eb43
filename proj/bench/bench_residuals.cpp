// Serial reference vs OpenMP kernels: residual reports, jet sampling and
// trajectory batches on a Case1 field with nontrivial functions.

#include <benchmark/benchmark.h>

#include <omp.h>

#include "symlorentz/dynamics.hpp"
#include "symlorentz/verify.hpp"

using namespace symlorentz;

namespace {

FieldSpec case1_spec() {
  SymmetryParams p;
  p.h11 = 0.5, p.h23 = 0.6, p.h12 = 0.8, p.c = 1.3;
  const Vec3d h = translation_for_center(p, {0.1, -0.2, 0.3});
  p.h1 = h[0], p.h2 = h[1], p.h3 = h[2];
  return FieldSpec(p, {parse("0.3 + 0.1*u*sin(v)"), parse("cos(u) - v^2"), parse("atan(u*v)"),
                       parse("u^2 + sin(v)")});
}

SampleBox case1_box() {
  SampleBox b;
  b.lo = {0.5, 0.5, 0.5};
  b.hi = {2.0, 1.5, 2.0};
  b.axis_margin = 0.05;
  return b;
}

void BM_ReportSerial(benchmark::State& state) {
  const FieldSpec spec = case1_spec();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_report_serial(ResidualKind::Lie, spec, case1_box(), n, 1));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * state.range(0));
}

void BM_ReportParallel(benchmark::State& state) {
  const FieldSpec spec = case1_spec();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_report(ResidualKind::Lie, spec, case1_box(), n, 1));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * state.range(0));
  state.counters["threads"] = omp_get_max_threads();
}

void BM_SampleSerial(benchmark::State& state) {
  const FieldSpec spec = case1_spec();
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_jets_serial(spec, case1_box(), static_cast<std::size_t>(state.range(0)), 1));
}

void BM_SampleParallel(benchmark::State& state) {
  const FieldSpec spec = case1_spec();
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_jets(spec, case1_box(), static_cast<std::size_t>(state.range(0)), 1));
}

std::vector<State> starts(std::size_t n) {
  std::vector<State> s;
  for (std::size_t i = 0; i < n; ++i) s.push_back(State{0.0, {1.0 + 0.05 * i, 1.0, 1.2}, {0.05, -0.05, 0.02}});
  return s;
}

void BM_TrajectoriesSerial(benchmark::State& state) {
  const FieldSpec spec = case1_spec();
  const auto s = starts(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    for (const State& s0 : s) benchmark::DoNotOptimize(integrate_rk4(spec, s0, 1e-3, 500));
}

void BM_TrajectoriesParallel(benchmark::State& state) {
  const FieldSpec spec = case1_spec();
  const auto s = starts(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(integrate_batch(spec, s, 1e-3, 500, Integrator::RK4));
}

}  // namespace

BENCHMARK(BM_ReportSerial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReportParallel)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SampleSerial)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleParallel)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TrajectoriesSerial)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrajectoriesParallel)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
