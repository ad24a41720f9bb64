#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "scenarios.hpp"
#include "vessel/error.hpp"
#include "vessel/grid/fixtures.hpp"
#include "vessel/tdsim/controllers.hpp"
#include "vessel/tdsim/simulate.hpp"

using namespace vessel;
using namespace vessel::tdsim;

namespace {
ControllerConfig shaver() {
  ControllerConfig c;
  c.id = "C";
  c.inverter = "INV";
  c.watched = {"G"};
  c.p_threshold_kw = 1500.0;
  c.q_threshold_kvar = 1000.0;
  c.p_rating_kw = 1500.0;
  c.q_rating_kvar = 1500.0;
  return c;
}
}  // namespace

TEST(PeakShave, ClampExamples) {
  const auto c = shaver();
  EXPECT_EQ(peak_shave_setpoint(c, 1800.0, 0.0).p_kw, 300.0);
  EXPECT_EQ(peak_shave_setpoint(c, 1400.0, 0.0).p_kw, 0.0);
  EXPECT_EQ(peak_shave_setpoint(c, 3100.0, 0.0).p_kw, 1500.0);
  EXPECT_EQ(peak_shave_setpoint(c, 0.0, 1200.0).q_kvar, 200.0);
}

TEST(QThreshold, Defaults) {
  EXPECT_EQ(default_q_threshold_kvar(2395.0), 1000.0);
  EXPECT_EQ(default_q_threshold_kvar(3213.0), 1500.0);
}

TEST(DpFailover, LatchExamples) {
  auto c = shaver();
  c.mode = ControllerMode::DpFailover;
  auto run = [&](double p) {
    ControllerState st(c.dp_delay);
    for (int k = 0; k <= 300; ++k) st.record(k * 1e-3, p, 0.0);
    return dp_failover_setpoint(st, c, 0.3);
  };
  EXPECT_EQ(run(2000.0).p_kw, 1500.0);
  EXPECT_EQ(run(800.0).p_kw, 800.0);
  ControllerState idle(c.dp_delay);
  idle.record(0.0, 500.0, 0.0);
  idle.record(0.2, 500.0, 0.0);
  EXPECT_EQ(dp_failover_setpoint(idle, c, std::nullopt).p_kw, 0.0);
}

TEST(DpFailover, ColdBufferThrows) {
  auto c = shaver();
  c.mode = ControllerMode::DpFailover;
  ControllerState st(c.dp_delay);
  st.record(0.0, 500.0, 0.0);
  st.record(0.05, 500.0, 0.0);
  EXPECT_THROW(dp_failover_setpoint(st, c, 0.05), InputError);
}

TEST(DpFailover, LatchHoldsUntilReset) {
  auto c = shaver();
  c.mode = ControllerMode::DpFailover;
  ControllerState st(c.dp_delay);
  for (int k = 0; k <= 200; ++k) st.record(k * 1e-3, k < 150 ? 900.0 : 0.0, 0.0);
  EXPECT_EQ(dp_failover_setpoint(st, c, 0.2).p_kw, 0.0 + 900.0);  // sample at 0.1 s
  st.record(0.5, 0.0, 0.0);
  EXPECT_EQ(dp_failover_setpoint(st, c, std::nullopt).p_kw, 900.0);
  st.reset();
  EXPECT_EQ(dp_failover_setpoint(st, c, std::nullopt).p_kw, 0.0);
}

TEST(ControllerState, BufferSpansDelay) {
  ControllerState st(0.1);
  for (int k = 0; k <= 1000; ++k) st.record(k * 1e-3, k, 0.0);
  EXPECT_TRUE(st.warm(1.0));
  EXPECT_NEAR(st.at(0.9).p_kw, 900.0, 1e-9);
  EXPECT_LE(st.samples().front().t, 0.9);
  EXPECT_LT(st.samples().size(), 150u);
}

TEST(ControllerConfig, Invariants) {
  auto c = shaver();
  c.dp_delay = 0.0;
  EXPECT_THROW(c.validate(), InputError);
  c = shaver();
  c.p_rating_kw = -1.0;
  EXPECT_THROW(c.validate(), InputError);
}

TEST(Events, Validation) {
  const auto g = grid::builtin_fixture(grid::FixtureName::AcVessel);
  EventSchedule ok{{load_step(1.0, "CRANES", 1.2), breaker_open(2.0, "CB_DG02")}};
  EXPECT_NO_THROW(ok.validate(g));
  EXPECT_THROW((EventSchedule{{breaker_open(2.0, "CB_DG02"), load_step(1.0, "CRANES", 1.2)}}.validate(g)),
               InputError);
  EXPECT_THROW((EventSchedule{{breaker_open(2.0, "CB_NOPE")}}.validate(g)), InputError);
  EXPECT_THROW((EventSchedule{{fault_clear(1.0)}}.validate(g)), InputError);
  EXPECT_THROW((EventSchedule{{fault_apply(1.0, "C_DG01", 1.5)}}.validate(g)), InputError);
}

TEST(SimConfig, Invariants) {
  SimConfig c;
  c.step = 0.0;
  EXPECT_THROW(c.validate(), InputError);
  c = {};
  c.end = c.step / 2;
  EXPECT_THROW(c.validate(), InputError);
}

TEST(Simulate, EquilibriumPersists) {
  for (auto name : grid::builtin_fixture_names()) {
    const auto ts = simulate(grid::builtin_fixture(name), {}, {}, {});
    ASSERT_EQ(ts.t.size(), 10001u);
    for (std::size_t c = 0; c < ts.names.size(); ++c) {
      const auto& d = ts.data[c];
      ASSERT_EQ(d.size(), ts.t.size());
      const double scale = std::max(1.0, std::abs(d.front()));
      for (double v : d) ASSERT_NEAR(v, d.front(), 1e-3 * scale) << name << " " << ts.names[c];
    }
  }
}

TEST(Simulate, IntegratorsAgree) {
  auto s = scenarios::dp_failover();
  const auto rk = simulate(s.grid, s.events, s.controllers, s.sim);
  s.sim.integrator = Integrator::Trapezoidal;
  const auto tr = simulate(s.grid, s.events, s.controllers, s.sim);
  const auto &a = rk.channel("DG#01.p_kw"), &b = tr.channel("DG#01.p_kw");
  for (std::size_t k = 0; k < a.size(); k += 50) ASSERT_NEAR(a[k], b[k], 5.0);
}

TEST(Simulate, NetworkIntervalSkipsIterations) {
  auto s = scenarios::peak_shave();
  s.sim.network_interval = 10;
  const auto ts = simulate(s.grid, s.events, s.controllers, s.sim);
  const auto& p = ts.channel("DG#01.p_kw");
  EXPECT_LE(*std::max_element(p.begin(), p.end()), 1500.0 + 5.0);
}

TEST(Simulate, BitIdenticalRuns) {
  const auto s = scenarios::peak_shave();
  const auto a = simulate(s.grid, s.events, s.controllers, s.sim);
  const auto b = simulate(s.grid, s.events, s.controllers, s.sim);
  EXPECT_EQ(a.names, b.names);
  EXPECT_EQ(a.data, b.data);
}

TEST(Simulate, PowerBalanceEachStep) {
  const auto s = scenarios::dp_failover();
  const auto ts = simulate(s.grid, s.events, s.controllers, s.sim);
  const double base_kw = s.grid.base_mva * 1000.0;
  for (double r : ts.channel("network.residual_kw")) ASSERT_LE(std::abs(r) / base_kw, 1e-8);
}

TEST(Simulate, PeakShaveHoldsThreshold) {
  const auto s = scenarios::peak_shave();
  const auto ts = simulate(s.grid, s.events, s.controllers, s.sim);
  const auto& p = ts.channel("DG#01.p_kw");
  const auto& inv = ts.channel("INV_BAT_PS.p_kw");
  const auto& load = ts.channel("PT_PS.p_kw");
  double step = 0.0;
  // One ramp step: the largest per-sample rise of the demand the generator would carry alone.
  for (std::size_t k = 1; k < load.size(); ++k) step = std::max(step, (p[k] + inv[k]) - (p[k - 1] + inv[k - 1]));
  for (std::size_t k = 0; k < p.size(); ++k) {
    ASSERT_LE(p[k], 1500.0 + step + 1e-6) << ts.t[k];
    ASSERT_GE(inv[k], 0.0);
    ASSERT_LE(inv[k], 1500.0);
  }
  EXPECT_GT(*std::max_element(inv.begin(), inv.end()), 200.0);
  EXPECT_EQ(inv.back(), 0.0);
}

TEST(Simulate, DpFailoverLatchesDelayedPower) {
  const auto s = scenarios::dp_failover();
  const auto ts = simulate(s.grid, s.events, s.controllers, s.sim);
  const auto& dg2 = ts.channel("DG#02.p_kw");
  const auto& dg1 = ts.channel("DG#01.p_kw");
  const auto& inv = ts.channel("INV_BAT_PS.p_kw");
  const auto at = [&](double t) { return static_cast<std::size_t>(std::llround(t / s.sim.step)); };
  const double latched = std::min(1500.0, dg2[at(1.9)]);
  for (std::size_t k = at(2.001); k < inv.size(); ++k) ASSERT_NEAR(inv[k], latched, 1e-9);
  for (std::size_t k = 0; k < at(2.0); ++k) ASSERT_EQ(inv[k], 0.0);
  const double pre = dg1[at(1.99)];
  EXPECT_NEAR(dg1[at(7.0)], pre, 0.02 * pre);
}

TEST(Simulate, MissingDynamicsRejected) {
  auto g = grid::builtin_fixture(grid::FixtureName::AcVessel);
  g.find_generator("DG#03")->dynamics.reset();
  EXPECT_THROW(simulate(g, {}, {}, {}), InputError);
}

TEST(Simulate, SustainedFaultDiverges) {
  auto g = scenarios::smib();
  g.find_generator("G")->p_setpoint_kw = 900.0;
  SimConfig cfg;
  cfg.end = 5.0;
  EXPECT_THROW(simulate(g, {{fault_apply(0.1, "A")}}, {}, cfg), NumericalError);
}
