#include <gtest/gtest.h>

#include "scenarios.hpp"
#include "vessel/error.hpp"
#include "vessel/grid/fixtures.hpp"
#include "vessel/tdsim/cct.hpp"

using namespace vessel;
using namespace vessel::tdsim;

TEST(Cct, SmibMatchesEqualArea) {
  const auto r = find_cct(scenarios::smib(), {"G", 0.9, 0.0, ""}, 0.0, 0.5, 1e-3);
  EXPECT_LE(r.hi - r.lo, 1e-3);
  EXPECT_NEAR(r.cct, scenarios::smib_oracle().cct, 2e-3);
  EXPECT_TRUE(r.monotone);
  EXPECT_TRUE(r.transcript.front().stable);  // zero-duration floor
}

TEST(Cct, HeavierLoadingClearsSooner) {
  const auto g = scenarios::smib();
  const auto a = find_cct(g, {"G", 0.9, 0.0, ""}, 0.0, 0.5, 1e-3);
  const auto b = find_cct(g, {"G", 0.95, 0.0, ""}, 0.0, 0.5, 1e-3);
  EXPECT_LE(b.cct, a.cct);
}

TEST(Cct, InvalidBracket) {
  const auto g = scenarios::smib();
  EXPECT_THROW(find_cct(g, {"G", 0.9, 0.0, ""}, 0.0, 0.1, 1e-3), NumericalError);
  EXPECT_THROW(find_cct(g, {"G", 0.9, 0.0, ""}, 0.3, 0.5, 1e-3), NumericalError);
  EXPECT_THROW(find_cct(g, {"NOPE", 0.9, 0.0, ""}, 0.0, 0.5, 1e-3), InputError);
}

TEST(Cct, ProbeAgreesWithSearch) {
  const auto g = scenarios::smib();
  const auto r = find_cct(g, {"G", 0.9, 0.0, ""}, 0.0, 0.5, 1e-3);
  EXPECT_TRUE(probe_clearing(g, {"G", 0.9, 0.0, ""}, r.lo).stable);
  EXPECT_FALSE(probe_clearing(g, {"G", 0.9, 0.0, ""}, r.hi).stable);
}

TEST(Cct, LosslessLineFaultTransfersNothing) {
  // With a reactive network any bolted fault leaves Pe = 0, wherever it sits.
  const auto g = scenarios::smib();
  const auto term = find_cct(g, {"G", 0.9, 0.0, ""}, 0.0, 0.5, 1e-3);
  const auto line = find_cct(g, {"G", 0.9, 0.5, "LINE"}, 0.0, 0.5, 1e-3);
  EXPECT_NEAR(line.cct, term.cct, 1e-3);
}

TEST(Cct, DispatchSetsLoading) {
  const auto g = dispatch_for_cct(grid::builtin_fixture(grid::FixtureName::AcVessel), {"DG#01", 0.9, 0.01, ""});
  EXPECT_DOUBLE_EQ(*g.find_generator("DG#01")->p_setpoint_kw, 0.9 * g.find_generator("DG#01")->rated_kw);
}
