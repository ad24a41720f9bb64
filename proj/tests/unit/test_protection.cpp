#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "scenarios.hpp"
#include "vessel/error.hpp"
#include "vessel/grid/fixtures.hpp"
#include "vessel/powerflow/ac.hpp"
#include "vessel/protection/fuse.hpp"
#include "vessel/protection/sequence.hpp"
#include "vessel/protection/tcc.hpp"
#include "vessel/protection/zsi.hpp"
#include "vessel/sc/ac.hpp"
#include "vessel/sc/dc.hpp"
#include "vessel/sc/timegrid.hpp"

using namespace vessel;
using namespace vessel::protection;

namespace {
grid::TccCurve curve() {
  grid::TccCurve c;
  c.long_time = {2000.0, grid::LongTimeKind::Definite, 20.0};
  c.short_time = {10000.0, 0.216, false};
  return c;
}

sc::FaultSummary summary_at(const grid::GridModel& g, const std::string& bus) {
  const auto sol = powerflow::solve_ac_powerflow(g);
  return sc::fault_summary(g, bus, sol, std::vector<double>{1.0 / 120.0});
}
}  // namespace

TEST(TripTime, Examples) {
  EXPECT_EQ(*trip_time(curve(), 32000.0, true), 0.216);
  EXPECT_FALSE(trip_time(curve(), 1500.0, true));
  auto inv = curve();
  inv.long_time = {1000.0, grid::LongTimeKind::Inverse, 10.0};
  EXPECT_NEAR(*trip_time(inv, 2000.0, true), 10.0 / 3.0, 1e-12);
  EXPECT_FALSE(trip_time(inv, 1000.0, true));  // pole at pickup
  EXPECT_THROW(trip_time(inv, -1.0, true), InputError);
}

TEST(TripTime, DirectionalAndDefiniteContinuity) {
  auto c = curve();
  c.short_time.directional = true;
  EXPECT_EQ(*trip_time(c, 32000.0, false), 20.0);  // long-time still sees it
  EXPECT_EQ(*trip_time(c, 32000.0, true), 0.216);
  for (double i = 10000.0; i < 1e6; i *= 1.7) EXPECT_EQ(*trip_time(curve(), i, true), 0.216);
  for (double i = 2001.0; i < 10000.0; i *= 1.3) EXPECT_EQ(*trip_time(curve(), i, true), 20.0);
}

TEST(Zsi, GeneratorTerminalFault) {
  const auto g = grid::builtin_fixture(grid::FixtureName::AcVessel);
  const auto graph = build_breaker_graph(g, summary_at(g, "DG01_S"));
  const auto z = apply_zsi(g, graph);
  EXPECT_EQ(z.nearest, std::vector<std::string>{"CB_DG01"});
  EXPECT_EQ(z.locked.size(), z.detecting.size() - 1);
  // The port tie receives the lock and passes it on to the mid section.
  auto has = [&](const char* from, const char* to) {
    return std::any_of(z.trace.begin(), z.trace.end(), [&](const LockSignal& l) { return l.from == from && l.to == to; });
  };
  EXPECT_TRUE(has("CB_DG01", "CB_PS_MID"));
  EXPECT_TRUE(has("CB_PS_MID", "CB_MID_SB"));
  EXPECT_TRUE(has("CB_PS_MID", "CB_DG05"));
}

TEST(Zsi, SingleSourceIslandHasNoLocks) {
  auto g = grid::builtin_fixture(grid::FixtureName::AcVessel);
  g.find_breaker("CB_PS_MID")->state = grid::SwitchState::Open;
  for (const char* id : {"DG#02"}) g.find_generator(id)->online = false;
  g.find_breaker("CB_DG02")->state = grid::SwitchState::Open;
  const auto graph = build_breaker_graph(g, summary_at(g, "DG01_T"));
  const auto z = apply_zsi(g, graph);
  EXPECT_EQ(z.nearest, std::vector<std::string>{"CB_DG01"});
  EXPECT_TRUE(z.locked.empty());
}

TEST(Sequence, ZsiDisabledAllAt216) {
  const auto g = grid::builtin_fixture(grid::FixtureName::AcVessel);
  const auto seq = sequence_of_operations(g, summary_at(g, "DG01_S"), {false, {}});
  EXPECT_EQ(seq.events.size(), seq.zsi.detecting.size());
  for (const auto& e : seq.events) {
    EXPECT_EQ(e.time, 0.216);
    EXPECT_FALSE(e.locked);
  }
}

TEST(Sequence, ZsiEnabledNearestFirst) {
  const auto g = grid::builtin_fixture(grid::FixtureName::AcVessel);
  const auto seq = sequence_of_operations(g, summary_at(g, "DG01_S"), {true, {}});
  ASSERT_GE(seq.events.size(), 2u);
  EXPECT_EQ(seq.events.front().breaker, "CB_DG01");
  for (std::size_t k = 1; k < seq.events.size(); ++k) {
    EXPECT_GT(seq.events[k].time, seq.events.front().time);
    EXPECT_NEAR(seq.events[k].time, 0.316, 1e-12);
    EXPECT_LT(seq.events[k].time, 0.542);
    EXPECT_EQ(seq.events[k].cause, TripCause::ZsiBackup);
  }
}

TEST(Sequence, BackupsTripWhenNearestFails) {
  const auto g = grid::builtin_fixture(grid::FixtureName::AcVessel);
  const auto fs = summary_at(g, "DG01_S");
  const auto normal = sequence_of_operations(g, fs, {true, {}});
  const auto failed = sequence_of_operations(g, fs, {true, {"CB_DG01"}});
  EXPECT_EQ(failed.events.size(), normal.events.size() - 1);
  for (const auto& e : failed.events) {
    EXPECT_NE(e.breaker, "CB_DG01");
    EXPECT_TRUE(std::isfinite(e.time));
  }
}

TEST(Sequence, ZsiOrderingAtEveryLocation) {
  const auto g = grid::builtin_fixture(grid::FixtureName::AcVessel);
  for (const auto& bus : g.buses) {
    if (bus.kind != grid::BusKind::AC) continue;
    const auto fs = summary_at(g, bus.id);
    SequenceResult seq;
    try {
      seq = sequence_of_operations(g, fs, {true, {}});
    } catch (const InputError&) {
      continue;  // nothing detects a fault behind a transformer
    }
    double nearest = 1e9, locked = 1e9;
    for (const auto& e : seq.events) (e.locked ? locked : nearest) = std::min(e.locked ? locked : nearest, e.time);
    EXPECT_LT(nearest, locked) << bus.id;
  }
}

TEST(Sequence, UndetectableFault) {
  auto g = grid::builtin_fixture(grid::FixtureName::AcVessel);
  for (auto& b : g.breakers) b.tcc.short_time.pickup = b.tcc.long_time.pickup = 1e9;
  EXPECT_THROW(sequence_of_operations(g, summary_at(g, "DG01_S")), InputError);
}

TEST(Sequence, MeshRejected) {
  auto g = grid::builtin_fixture(grid::FixtureName::AcVessel);
  g.branches.push_back({"MESH", "PS", "SB", grid::BranchKind::Cable, 0.001, 0.01, 0.0, true});
  EXPECT_THROW(build_breaker_graph(g, summary_at(g, "PS")), InputError);
}

TEST(Selectivity, Examples) {
  const std::vector<TripEvent> two{{"CB_DG01", 0.080, TripCause::ShortTime, false},
                                   {"TIE", 0.316, TripCause::ZsiBackup, true}};
  const auto a = selectivity_check(two, 0.542);
  EXPECT_TRUE(a.selective);
  EXPECT_TRUE(a.cleared_within_cct);
  const auto b = selectivity_check({{"CB", 0.216, TripCause::ShortTime, false}}, 0.542);
  EXPECT_TRUE(b.cleared_within_cct);
  EXPECT_NEAR(b.margin, 0.326, 1e-12);
  const auto c = selectivity_check({{"CB", 0.600, TripCause::ShortTime, false}}, 0.542);
  EXPECT_FALSE(c.cleared_within_cct);
  const auto d = selectivity_check(two, 0.542, {"TIE"});
  EXPECT_FALSE(d.selective);
  EXPECT_THROW(selectivity_check({}, 0.542), InputError);
}

TEST(Fuse, CapacitorTraceBelowRatingNeverClears) {
  // Total let-through of the 650 V branch is C EC^2 / (2 R) = 9268.74 A^2 s.
  const auto tr = sc::capacitor_sc_trace(scenarios::fig6_capacitor(), sc::default_dc_time_grid());
  const auto r = fuse_i2t_clearing(tr, {"F", "CH1", 9350.0, std::nullopt});
  EXPECT_FALSE(r.cleared());
  EXPECT_NEAR(r.let_through, 9268.738574040219, 0.005 * 9268.74);
  EXPECT_FALSE(fuse_i2t_clearing(tr, {"F", "CH1", 1e6, std::nullopt}).cleared());
  EXPECT_TRUE(fuse_i2t_clearing(tr, {"F", "CH1", 9000.0, std::nullopt}).cleared());
}

TEST(Fuse, BatteryOracle) {
  // Root of Ip^2 [t - 2 tau (1 - e^-t/tau) + tau/2 (1 - e^-2t/tau)] = 9350, 30 digits.
  const auto bat = *grid::builtin_fixture(grid::FixtureName::DcVessel).find_battery("BAT_PS");
  const auto tr = sc::battery_sc_trace(bat, sc::default_dc_time_grid());
  const auto r = fuse_i2t_clearing(tr, {"F", "BAT_PS", 9350.0, std::nullopt});
  ASSERT_TRUE(r.cleared());
  EXPECT_NEAR(*r.t_clear, 0.00019401742320702905, 1e-9);
}

TEST(Fuse, MonotoneInScale) {
  const auto bat = *grid::builtin_fixture(grid::FixtureName::DcVessel).find_battery("BAT_PS");
  const auto tr = sc::battery_sc_trace(bat, sc::default_dc_time_grid());
  const auto e = cumulative_i2t(tr.t, tr.i);
  for (std::size_t k = 1; k < e.size(); ++k) ASSERT_GE(e[k], e[k - 1]);
  double prev = 1.0;
  for (double k : {1.0, 1.1, 1.5, 2.0, 4.0}) {
    auto scaled = tr.i;
    for (auto& v : scaled) v *= k;
    const auto r = fuse_i2t_clearing(tr.t, scaled, {"F", "", 9350.0, std::nullopt});
    EXPECT_LE(*r.t_clear, prev);
    prev = *r.t_clear;
  }
}

TEST(Fuse, ShortTraceIsAnError) {
  const std::vector<double> t{0.0, 1e-4}, i{1000.0, 1000.0};
  EXPECT_THROW(fuse_i2t_clearing(t, i, {"F", "", 9350.0, std::nullopt}), InputError);
}
