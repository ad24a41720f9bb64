#include "scenarios.hpp"

#include <cmath>

#include "vessel/grid/fixtures.hpp"

namespace scenarios {

using namespace vessel::grid;
using namespace vessel::tdsim;

namespace {

Bus ac_bus(std::string id, double v, double f) { return Bus{std::move(id), BusKind::AC, v, f}; }

GeneratorSpec machine(std::string id, std::string bus, double kva, double v, double f) {
  GeneratorSpec g;
  g.id = std::move(id);
  g.bus = std::move(bus);
  g.rated_kva = kva;
  g.rated_kw = kva;
  g.power_factor = 1.0;
  g.voltage = v;
  g.rated_current = kva * 1000.0 / (kSqrt3 * v);
  g.frequency = f;
  g.speed_rpm = 60.0 * f / 2.0;
  g.poles = 4;
  return g;
}

void isolate(GridModel& g, const std::string& gen) {
  g.find_generator(gen)->online = false;
  std::string tag = gen;
  tag.erase(tag.find('#'), 1);
  g.find_breaker("CB_" + tag)->state = SwitchState::Open;
}

GridModel split_ac_vessel() {
  auto g = builtin_fixture(FixtureName::AcVessel);
  g.find_breaker("CB_PS_MID")->state = SwitchState::Open;
  g.find_breaker("CB_MID_SB")->state = SwitchState::Open;
  isolate(g, "DG#04");
  return g;
}

}  // namespace

GridModel smib() {
  GridModel g;
  g.name = "smib";
  g.base_mva = 1.0;
  g.buses = {ac_bus("A", 1000.0, 50.0), ac_bus("B", 1000.0, 50.0)};
  g.branches.push_back(BranchSpec{"LINE", "A", "B", BranchKind::Cable, 0.0, 0.2, 0.0, false});
  auto m = machine("G", "A", 1000.0, 1000.0, 50.0);
  GeneratorDynamicParams d;
  d.xd = 1.8;
  d.xd_t = 0.3;
  d.xd_st = 0.2;
  d.td0_t = 5.0;
  d.td0_st = 0.05;
  d.inertia_h = 3.0;
  m.dynamics = d;
  g.generators.push_back(m);
  auto inf = machine("INF", "B", 100000.0, 1000.0, 50.0);
  inf.infinite = true;
  g.generators.push_back(inf);
  return g;
}

SmibOracle smib_oracle() {
  // Equal-area criterion, fault at the machine terminal (Pe = 0 while
  // faulted), post-fault network = pre-fault network, Pm = 0.9 pu.
  return {0.438670454248687, 2.1189624098461377, 0.213668606330214};
}

TdScenario peak_shave() {
  TdScenario s;
  s.grid = split_ac_vessel();
  isolate(s.grid, "DG#02");
  s.grid.find_load("PT_PS")->demand_factor = 0.4;
  ControllerConfig c;
  c.id = "PS_PEAK";
  c.mode = ControllerMode::PeakShave;
  c.inverter = "INV_BAT_PS";
  c.watched = {"DG#01"};
  c.p_threshold_kw = 1500.0;
  c.q_threshold_kvar = default_q_threshold_kvar(s.grid.find_generator("DG#01")->rated_kva);
  c.p_rating_kw = 1500.0;
  c.q_rating_kvar = 1500.0;
  s.controllers = {c};
  s.events.events = {load_step(5.0, "PT_PS", 1.4, 3.0), load_step(10.0, "PT_PS", 1.0, 3.0)};
  s.sim.end = 16.0;
  return s;
}

TdScenario dp_failover() {
  TdScenario s;
  s.grid = split_ac_vessel();
  s.grid.find_load("PT_PS")->demand_factor = 0.8;
  ControllerConfig c;
  c.id = "PS_DP";
  c.mode = ControllerMode::DpFailover;
  c.inverter = "INV_BAT_PS";
  c.watched = {"DG#02"};
  c.p_rating_kw = 1500.0;
  c.q_rating_kvar = 1500.0;
  c.q_threshold_kvar = default_q_threshold_kvar(s.grid.find_generator("DG#02")->rated_kva);
  s.controllers = {c};
  s.events.events = {breaker_open(2.0, "CB_DG02")};
  s.sim.end = 8.0;
  return s;
}

GridModel two_bus() {
  GridModel g;
  g.name = "two_bus";
  g.base_mva = 1.0;
  g.buses = {ac_bus("B1", 1000.0, 50.0), ac_bus("B2", 1000.0, 50.0)};
  g.branches.push_back(BranchSpec{"L12", "B1", "B2", BranchKind::Cable, 0.01, 0.10, 0.0, false});
  g.generators.push_back(machine("G", "B1", 5000.0, 1000.0, 50.0));
  LoadSpec l;
  l.id = "LD";
  l.bus = "B2";
  l.rated_kva = 1000.0 * std::sqrt(1.25);
  l.power_factor = 1.0 / std::sqrt(1.25);
  g.loads.push_back(l);
  return g;
}

CapacitorBranch fig6_capacitor() { return CapacitorBranch{"CAP", 2400e-6, 54.7e-3, 5.5e-6, 650.0, true}; }

}  // namespace scenarios
