#include "vessel/tdsim/cct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vessel/error.hpp"
#include "vessel/grid/topology.hpp"

namespace vessel::tdsim {
namespace {

const grid::GeneratorSpec& machine(const grid::GridModel& g, const CctFault& f) {
  const auto* gen = g.find_generator(f.machine);
  if (!gen) throw InputError("cct: unknown machine '" + f.machine + "'");
  if (!gen->online || gen->infinite) throw InputError("cct: machine '" + f.machine + "' must be an online finite machine");
  return *gen;
}

// Slack for the pre-fault power flow: the infinite bus if reachable, else the
// largest other online machine in the same island.
std::string cct_slack(const grid::GridModel& g, const CctFault& f) {
  const auto& gen = machine(g, f);
  grid::BusGraph graph(g);
  const auto labels = graph.component_labels();
  const auto island = labels[graph.index(gen.bus)];
  const grid::GeneratorSpec* best = nullptr;
  for (const auto& o : g.generators) {
    if (o.id == gen.id || !o.online || labels[graph.index(o.bus)] != island) continue;
    if (o.infinite) return o.id;
    if (!best || o.rated_kva > best->rated_kva) best = &o;
  }
  if (!best) throw InputError("cct: no other source in the island of '" + gen.id + "' to act as slack");
  return best->id;
}

EventSchedule fault_schedule(const grid::GridModel& g, const CctFault& f, double clearing, double t_fault) {
  EventSchedule s;
  if (clearing <= 0.0) return s;
  const auto& gen = machine(g, f);
  std::string target = f.branch;
  double location = f.location;
  if (target.empty() && f.location > 0.0) {
    for (const auto& b : g.branches) {
      if (b.from == gen.bus || b.to == gen.bus) {
        target = b.id;
        location = b.from == gen.bus ? f.location : 1.0 - f.location;
        break;
      }
    }
    if (target.empty()) throw InputError("cct: no branch at the bus of '" + gen.id + "'");
  } else if (target.empty()) {
    target = gen.bus;
  }
  s.events.push_back(fault_apply(t_fault, target, location));
  s.events.push_back(fault_clear(t_fault + clearing));
  return s;
}

}  // namespace

grid::GridModel dispatch_for_cct(const grid::GridModel& grid, const CctFault& fault) {
  if (!(fault.loading > 0.0) || fault.loading > 1.5) throw InputError("cct: loading must be in (0, 1.5]");
  if (fault.location < 0.0 || fault.location > 1.0) throw InputError("cct: location must be in [0, 1]");
  grid::GridModel g = grid;
  const auto& gen = machine(g, fault);
  g.find_generator(gen.id)->p_setpoint_kw = fault.loading * gen.rated_kw;
  return g;
}

CctProbe probe_clearing(const grid::GridModel& grid, const CctFault& fault, double clearing,
                        const CctOptions& options) {
  if (clearing < 0.0) throw InputError("cct: clearing time must be >= 0");
  const auto g = dispatch_for_cct(grid, fault);
  SimConfig cfg = options.sim;
  cfg.slack = cct_slack(g, fault);
  cfg.end = options.fault_time + clearing + options.post_window;
  cfg.stop_angle = grid::kPi;
  const auto ts = simulate(g, fault_schedule(g, fault, clearing, options.fault_time), {}, cfg);
  return {clearing, !ts.stopped_early && ts.max_angle_separation < grid::kPi, ts.max_angle_separation};
}

CctResult find_cct(const grid::GridModel& grid, const CctFault& fault, double t_lo, double t_hi, double tol,
                   const CctOptions& options) {
  if (!(tol > 0.0)) throw InputError("cct: tolerance must be > 0");
  if (!(t_lo >= 0.0 && t_hi > t_lo)) throw InputError("cct: need 0 <= t_lo < t_hi");
  CctResult r;
  auto probe = [&](double t) {
    r.transcript.push_back(probe_clearing(grid, fault, t, options));
    return r.transcript.back().stable;
  };
  const bool lo_stable = probe(t_lo);
  const bool hi_stable = probe(t_hi);
  if (!lo_stable || hi_stable) {
    throw NumericalError("cct: invalid bracket, t_lo must be stable and t_hi unstable (got " +
                         std::string(lo_stable ? "stable" : "unstable") + "/" + (hi_stable ? "stable" : "unstable") +
                         ")");
  }
  r.lo = t_lo;
  r.hi = t_hi;
  while (r.hi - r.lo > tol) {
    const double mid = 0.5 * (r.lo + r.hi);
    (probe(mid) ? r.lo : r.hi) = mid;
  }
  double max_stable = -std::numeric_limits<double>::infinity();
  double min_unstable = std::numeric_limits<double>::infinity();
  for (const auto& p : r.transcript) {
    if (p.stable) max_stable = std::max(max_stable, p.clearing);
    else min_unstable = std::min(min_unstable, p.clearing);
  }
  r.monotone = max_stable < min_unstable;
  r.cct = r.lo;
  return r;
}

}  // namespace vessel::tdsim
