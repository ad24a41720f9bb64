#include <complex>
#include <gtest/gtest.h>

#include <cmath>

#include "scenarios.hpp"
#include "vessel/error.hpp"
#include "vessel/grid/fixtures.hpp"
#include "vessel/powerflow/ac.hpp"
#include "vessel/powerflow/dc_balance.hpp"
#include "vessel/powerflow/operating_point.hpp"

using namespace vessel;
using namespace vessel::powerflow;

TEST(Powerflow, FixturesConvergeTight) {
  for (auto name : grid::builtin_fixture_names()) {
    const auto sol = solve_ac_powerflow(grid::builtin_fixture(name));
    EXPECT_LE(sol.max_mismatch, 1e-8) << name;
    for (const auto& b : sol.buses) {
      if (b.energized) EXPECT_NEAR(b.v_pu, 1.0, 0.05) << b.bus;
    }
  }
}

TEST(Powerflow, SingleSlackNoLoad) {
  auto g = scenarios::two_bus();
  g.loads.clear();
  const auto sol = solve_ac_powerflow(g);
  EXPECT_EQ(sol.iterations, 0);
  for (const auto& b : sol.buses) {
    EXPECT_DOUBLE_EQ(b.v_pu, 1.0);
    EXPECT_DOUBLE_EQ(b.angle, 0.0);
  }
  EXPECT_DOUBLE_EQ(sol.find_element("G")->p_kw, 0.0);
}

TEST(Powerflow, TwoBusOracle) {
  // Fixed-point solution of V2 = 1 - z conj(S / V2) in double precision.
  const auto sol = solve_ac_powerflow(scenarios::two_bus());
  const auto* b2 = sol.find_bus("B2");
  EXPECT_NEAR(b2->v_pu, 0.9302749945194247, 1e-8);
  EXPECT_NEAR(b2->angle, -0.10229867428020094, 1e-8);
  // Losses on the line: |I|^2 R.
  const double i2 = std::norm(std::complex<double>(1.0, -0.5) / std::polar(b2->v_pu, b2->angle));
  EXPECT_NEAR(sol.losses_kw, i2 * 0.01 * 1000.0, 1e-5);
  EXPECT_NEAR(sol.find_element("LD")->p_kw, -1000.0, 1e-9);
}

TEST(Powerflow, InfeasibleLoadDoesNotConverge) {
  auto g = scenarios::two_bus();
  g.loads[0].rated_kva *= 50.0;
  EXPECT_THROW(solve_ac_powerflow(g), NumericalError);
}

TEST(Powerflow, SlackOverride) {
  const auto g = grid::builtin_fixture(grid::FixtureName::AcVessel);
  PowerflowOptions opt;
  opt.slack = "DG#05";
  const auto sol = solve_ac_powerflow(g, opt);
  ASSERT_EQ(sol.slack_elements.size(), 1u);
  EXPECT_EQ(sol.slack_elements[0], "DG#05");
  EXPECT_LE(sol.max_mismatch, 1e-8);
}

TEST(Powerflow, Deterministic) {
  const auto g = grid::builtin_fixture(grid::FixtureName::DcVessel);
  const auto a = solve_ac_powerflow(g), b = solve_ac_powerflow(g);
  ASSERT_EQ(a.buses.size(), b.buses.size());
  for (std::size_t i = 0; i < a.buses.size(); ++i) {
    EXPECT_EQ(a.buses[i].v_pu, b.buses[i].v_pu);
    EXPECT_EQ(a.buses[i].angle, b.buses[i].angle);
  }
}

TEST(DcBalance, SingleCharger) {
  const auto s = solve_dc_balance(DcBalanceProblem{{{"CH", "G", 1000.0, 1.0}}, 400.0});
  EXPECT_DOUBLE_EQ(s.transferred_kw.at("CH"), 400.0);
  EXPECT_NEAR(s.residual_kw, 0.0, 1e-9);
}

TEST(DcBalance, TwoEqualChargers) {
  const auto s = solve_dc_balance(DcBalanceProblem{{{"CH1", "G1", 465.6, 0.97}, {"CH2", "G2", 465.6, 0.97}}, 600.0});
  EXPECT_NEAR(s.transferred_kw.at("CH1"), 309.28, 0.005);
  EXPECT_NEAR(s.transferred_kw.at("CH2"), 600.0 / 0.97 / 2.0, 1e-9);
  EXPECT_NEAR(s.losses_kw, 600.0 / 0.97 - 600.0, 1e-9);
}

TEST(DcBalance, CapabilityExceeded) {
  EXPECT_THROW(solve_dc_balance(DcBalanceProblem{{{"CH1", "G1", 465.6, 0.97}}, 2000.0}), InputError);
}

TEST(DcBalance, FixtureSidesWithinCapability) {
  const auto s = solve_dc_balance(grid::builtin_fixture(grid::FixtureName::DcVessel));
  EXPECT_NEAR(s.residual_kw, 0.0, 1e-6);
  for (const auto& [id, kw] : s.transferred_kw) EXPECT_LE(kw, 465.6) << id;
}

TEST(OperatingPoint, NoLoadAndRated) {
  const auto nl = make_operating_point(690.0, 0.0, 0.0);
  EXPECT_EQ(nl.i0, 0.0);
  EXPECT_EQ(nl.u0, 690.0);
  const auto rated = make_operating_point(690.0, 1916.0, 1437.0);
  EXPECT_NEAR(rated.i0, 2004.0, 2004.0 * 1e-3);
  EXPECT_NEAR(rated.phi0, std::acos(0.80), 1e-3);
}

TEST(OperatingPoint, NinetyPercentDispatch) {
  auto g = grid::builtin_fixture(grid::FixtureName::AcVessel);
  auto* gen = g.find_generator("DG#01");
  gen->p_setpoint_kw = 0.9 * gen->rated_kw;
  const auto at_pf = make_operating_point(690.0, 0.9 * 1916.0, 0.9 * 1437.0);
  EXPECT_NEAR(at_pf.i0, 0.9 * gen->rated_current, 0.005 * 0.9 * gen->rated_current);
  // From a solved flow the reactive share comes from voltage regulation.
  const auto sol = solve_ac_powerflow(g);
  const auto op = prefault_operating_point(sol, "DG#01", 690.0);
  const auto* e = sol.find_element("DG#01");
  EXPECT_NEAR(e->p_kw, 0.9 * gen->rated_kw, 1e-6);
  EXPECT_NEAR(op.i0, std::hypot(e->p_kw, e->q_kvar) * 1000.0 / (grid::kSqrt3 * op.u0), 1e-9);
  EXPECT_THROW(prefault_operating_point(sol, "NOPE", 690.0), InputError);
}
