#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "scenarios.hpp"
#include "vessel/error.hpp"
#include "vessel/grid/fixtures.hpp"
#include "vessel/powerflow/ac.hpp"
#include "vessel/sc/ac.hpp"
#include "vessel/sc/timegrid.hpp"

using namespace vessel;
using namespace vessel::sc;

TEST(TimeConstants, ConversionExamples) {
  const auto oc = convert_time_constants(2.0, 0.3, 0.2, 0.75, 0.02);
  EXPECT_NEAR(oc.td0_t, 5.0, 1e-12);
  EXPECT_NEAR(oc.td0_st, 0.03, 1e-12);
}

TEST(TimeConstants, RoundTripAndLimit) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const double xd_st = 0.05 + 0.2 * u(rng), xd_t = xd_st * (1.1 + u(rng)), xd = xd_t * (1.5 + 5 * u(rng));
    const double td_t = 0.1 + u(rng), td_st = 0.005 + 0.05 * u(rng);
    const auto oc = convert_time_constants(xd, xd_t, xd_st, td_t, td_st);
    const auto sc = to_short_circuit_constants(xd, xd_t, xd_st, oc.td0_t, oc.td0_st);
    EXPECT_NEAR(sc.td_t, td_t, 1e-14 * td_t * 10);
    EXPECT_NEAR(sc.td_st, td_st, 1e-14 * td_st * 10);
  }
  // xd_t -> xd: the transient ratio tends to one.
  const auto lim = convert_time_constants(1.0, 1.0 - 1e-12, 0.2, 0.75, 0.02);
  EXPECT_NEAR(lim.td0_t, 0.75, 1e-9);
  EXPECT_THROW(convert_time_constants(0.2, 0.3, 0.2, 0.75, 0.02), InputError);
}

namespace {
MachineScModel oracle_machine() {
  MachineScModel m;
  m.x_st_ohm = 0.03;
  m.x_t_ohm = 0.05;
  m.xd_ohm = 1.0;
  m.td_st = 0.02;
  m.td_t = 0.5;
  m.tdc = 0.04;
  m.ikd = 3000.0;
  return m;
}
}  // namespace

TEST(MachineTrace, NoLoadOracle) {
  const std::vector<double> half{1.0 / 120.0};
  const auto tr = machine_sc_trace(oracle_machine(), {690.0, 0.0, 0.0}, half);
  EXPECT_NEAR(tr.iac[0], 11387.0, 11.387);
  EXPECT_NEAR(tr.idc[0], 15248.0, 15.248);
  EXPECT_DOUBLE_EQ(tr.e_q0_st, 690.0 / grid::kSqrt3);
  EXPECT_DOUBLE_EQ(tr.e_q0_t, 690.0 / grid::kSqrt3);
  EXPECT_EQ(tr.ikd_source, ValueSource::Datasheet);
}

TEST(MachineTrace, AsymptoteIsIkd) {
  const std::vector<double> late{60.0};
  EXPECT_NEAR(machine_sc_trace(oracle_machine(), {690.0, 0.0, 0.0}, late).iac[0], 3000.0, 1e-6);
}

TEST(MachineTrace, MonotoneDecay) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto tg = default_ac_time_grid();
  for (int k = 0; k < 50; ++k) {
    MachineScModel m;
    m.x_st_ohm = 0.01 + 0.05 * u(rng);
    m.x_t_ohm = m.x_st_ohm * (1.2 + u(rng));
    m.xd_ohm = m.x_t_ohm * (3.0 + 5.0 * u(rng));
    m.td_st = 0.005 + 0.03 * u(rng);
    m.td_t = 0.1 + u(rng);
    m.tdc = 0.01 + 0.05 * u(rng);
    const auto tr = machine_sc_trace(m, powerflow::make_operating_point(690.0, 1000 * u(rng), 800 * u(rng)), tg);
    for (std::size_t i = 1; i < tg.size(); ++i) {
      ASSERT_LE(tr.iac[i], tr.iac[i - 1] * (1 + 1e-15));
      ASSERT_LT(tr.idc[i], tr.idc[i - 1]);
    }
    EXPECT_EQ(tr.ikd_source, ValueSource::Estimated);
  }
}

TEST(MotorGroup, CraneExample) {
  const auto g = grid::builtin_fixture(grid::FixtureName::AcVessel);
  auto crane = *g.find_load("CRANES");
  crane.motor_fraction = 0.8;
  crane.static_fraction = 0.2;
  crane.locked_rotor_multiplier = 6.25;
  EXPECT_NEAR(motor_rated_current(crane, 690.0), 499.9, 0.1);
  const std::vector<double> t0{0.0};
  const auto tr = motor_group_sc_trace(crane, 690.0, t0, 60.0);
  EXPECT_NEAR(tr.iac[0], 3124.0, 1.0);
  crane.motor_fraction = 0.0;
  crane.static_fraction = 1.0;
  EXPECT_THROW(motor_group_sc_trace(crane, 690.0, t0, 60.0), InputError);
}

TEST(Vfd, ConstantContribution) {
  grid::ConverterSpec c;
  c.id = "VFD";
  c.rated_current = 1150.0;
  const auto tg = default_ac_time_grid();
  const auto tr = vfd_contribution(c, tg);
  for (double v : tr.iac) ASSERT_DOUBLE_EQ(v, 1725.0);
  c.sc_contribution_factor = 1.0;
  EXPECT_DOUBLE_EQ(vfd_contribution(c, tg).iac.back(), 1150.0);
  c.rated_current = 2060.0;
  c.sc_contribution_factor = 1.5;
  EXPECT_DOUBLE_EQ(vfd_contribution(c, tg).iac.front(), 3090.0);
}

TEST(Compose, PublishedTriples) {
  const double triples[][3] = {
      {13.759, 16.311, 35.769}, {17.971, 21.076, 46.490}, {12.733, 15.458, 33.521}, {7.035, 7.689, 17.638}};
  for (const auto& t : triples) EXPECT_NEAR(compose_peak(t[0], t[1]), t[2], 0.002 * t[2]);
}

TEST(FaultSummary, AcVesselLinearAndComposed) {
  const auto g = grid::builtin_fixture(grid::FixtureName::AcVessel);
  const auto sol = powerflow::solve_ac_powerflow(g);
  const auto tg = default_ac_time_grid();
  const auto fs = fault_summary(g, "PS", sol, tg);
  EXPECT_GE(fs.contributors.size(), 5u);
  EXPECT_DOUBLE_EQ(fs.ip, compose_peak(fs.iac_half_cycle, fs.idc_half_cycle));
  for (std::size_t k = 0; k < fs.t.size(); k += 97) {
    double iac = 0.0, idc = 0.0;
    for (const auto& c : fs.contributors) iac += c.iac[k], idc += c.idc[k];
    EXPECT_NEAR(fs.iac_total[k], iac, 1e-9 * iac);
    EXPECT_NEAR(fs.idc_total[k], idc, 1e-9 * idc);
  }
  double half = 0.0;
  for (const auto& h : fs.half_cycle) half += h.iac;
  EXPECT_NEAR(fs.iac_half_cycle, half, 1e-9 * half);
}

TEST(FaultSummary, IsolatedBusHasNoContributors) {
  auto g = scenarios::two_bus();
  g.loads.clear();
  g.buses.push_back({"B3", grid::BusKind::AC, 1000.0, 50.0});
  grid::BreakerSpec b;
  b.id = "CB3";
  b.from = "B2";
  b.to = "B3";
  b.state = grid::SwitchState::Open;
  g.breakers.push_back(b);
  const auto sol = powerflow::solve_ac_powerflow(g);
  EXPECT_THROW(fault_summary(g, "B3", sol, default_ac_time_grid()), InputError);
}
