// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include <random>

#include "ctrw/aig.hpp"
#include "ctrw/datagen.hpp"
#include "ctrw/oracle.hpp"
#include "ctrw/window.hpp"

using namespace ctrw;

namespace {

Aig wide_graph(int k) {
  std::mt19937_64 rng(1234);
  return random_aig(k, 4, 400, rng).compacted();
}

void BM_SimulateParallel(benchmark::State& st) {
  Aig g = wide_graph(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(simulate_all(g));
}

void BM_SimulateSerial(benchmark::State& st) {
  Aig g = wide_graph(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(simulate_all_serial(g));
}

void BM_RequirementsParallel(benchmark::State& st) {
  Aig g = wide_graph(16);
  auto tables = simulate_all(g);
  auto ws = extract_ffws(g, {});
  for (auto _ : st)
    for (const auto& w : ws) benchmark::DoNotOptimize(window_requirements(g, w, tables));
}

void BM_RequirementsSerial(benchmark::State& st) {
  Aig g = wide_graph(16);
  auto tables = simulate_all(g);
  auto ws = extract_ffws(g, {});
  for (auto _ : st)
    for (const auto& w : ws) benchmark::DoNotOptimize(window_requirements_serial(g, w, tables));
}

void oracle_xor3(benchmark::State& st, bool parallel) {
  TruthTable x = TruthTable::nth_var(3, 1) ^ TruthTable::nth_var(3, 2) ^ TruthTable::nth_var(3, 3);
  std::vector<Requirement> r{Requirement::exactly(x)};
  OracleOptions o;
  o.parallel = parallel;
  for (auto _ : st) benchmark::DoNotOptimize(exact_min_ands(r, 6, o));
}

void BM_OracleParallel(benchmark::State& st) { oracle_xor3(st, true); }
void BM_OracleSerial(benchmark::State& st) { oracle_xor3(st, false); }

}  // namespace

BENCHMARK(BM_SimulateParallel)->Arg(12)->Arg(16);
BENCHMARK(BM_SimulateSerial)->Arg(12)->Arg(16);
BENCHMARK(BM_RequirementsParallel);
BENCHMARK(BM_RequirementsSerial);
BENCHMARK(BM_OracleParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
