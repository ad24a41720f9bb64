#include <benchmark/benchmark.h>

#include "vessel/grid/fixtures.hpp"
#include "vessel/powerflow/ac.hpp"
#include "vessel/sc/ac.hpp"
#include "vessel/sc/dc.hpp"
#include "vessel/sc/timegrid.hpp"
#include "vessel/tdsim/cct.hpp"
#include "vessel/tdsim/simulate.hpp"

using namespace vessel;

namespace {

void BM_Powerflow(benchmark::State& state) {
  const auto g = grid::builtin_fixture(grid::FixtureName::AcVessel);
  for (auto _ : state) benchmark::DoNotOptimize(powerflow::solve_ac_powerflow(g));
}
BENCHMARK(BM_Powerflow);

void BM_AcFaultSummary(benchmark::State& state) {
  const auto g = grid::builtin_fixture(grid::FixtureName::AcVessel);
  const auto sol = powerflow::solve_ac_powerflow(g);
  const auto tg = sc::default_ac_time_grid();
  for (auto _ : state) benchmark::DoNotOptimize(sc::fault_summary(g, "PS", sol, tg));
}
BENCHMARK(BM_AcFaultSummary);

void BM_DcFaultSummary(benchmark::State& state) {
  const auto g = grid::builtin_fixture(grid::FixtureName::DcVessel);
  const auto tg = sc::default_dc_time_grid();
  for (auto _ : state) benchmark::DoNotOptimize(sc::dc_fault_summary(g, "DC_PS", tg));
}
BENCHMARK(BM_DcFaultSummary);

void BM_Tdsim(benchmark::State& state) {
  const auto g = grid::builtin_fixture(grid::FixtureName::AcVessel);
  tdsim::SimConfig cfg;
  cfg.end = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tdsim::simulate(g, {}, {}, cfg));
}
BENCHMARK(BM_Tdsim)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_Cct(benchmark::State& state) {
  const auto g = grid::builtin_fixture(grid::FixtureName::AcVessel);
  const tdsim::CctFault f{"DG#01", 0.9, 0.01, "C_DG01"};
  for (auto _ : state) benchmark::DoNotOptimize(tdsim::find_cct(g, f, 0.0, 2.0, 1e-3));
}
BENCHMARK(BM_Cct)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
