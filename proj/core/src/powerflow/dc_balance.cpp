#include "vessel/powerflow/dc_balance.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "vessel/error.hpp"
#include "vessel/grid/topology.hpp"

namespace vessel::powerflow {
namespace {

// Output of an inverter from the loads it feeds.
double load_based_output(const grid::GridModel& g, const grid::ConverterSpec& conv, const grid::BusGraph& graph) {
  double p = 0.0;
  bool named = false;
  for (const auto& l : g.loads) {
    if (l.converter == conv.id) {
      p += l.p_kw();
      named = true;
    }
  }
  if (named) return p;
  if (conv.kind == grid::ConverterKind::GridInverter && !conv.ac_bus.empty()) {
    std::vector<bool> in(g.buses.size(), false);
    for (std::size_t n : graph.reachable(graph.index(conv.ac_bus))) in[n] = true;
    for (const auto& l : g.loads) {
      if (in[graph.index(l.bus)] && l.converter.empty()) p += l.p_kw();
    }
    return p;
  }
  return conv.p_setpoint_kw;
}

}  // namespace

DcBalanceSolution solve_dc_balance(const DcBalanceProblem& problem, double tol_kw) {
  DcBalanceSolution sol;
  sol.demand_kw = problem.demand_kw;
  if (problem.demand_kw < 0.0) throw InputError("DC demand must be >= 0");
  double deliverable = 0.0;
  double capability = 0.0;
  for (const auto& s : problem.sources) {
    if (!(s.efficiency > 0.0 && s.efficiency <= 1.0)) throw InputError("converter efficiency must lie in (0, 1]");
    capability += s.capability_kw;
    deliverable += s.capability_kw * s.efficiency;
  }
  if (problem.demand_kw > deliverable + tol_kw) {
    throw InputError("DC demand " + std::to_string(problem.demand_kw) + " kW exceeds online source capability " +
                     std::to_string(deliverable) + " kW");
  }
  double supplied = 0.0;
  for (const auto& s : problem.sources) {
    const double dc_side = capability > 0.0 ? problem.demand_kw * s.capability_kw / capability : 0.0;
    const double ac_side = dc_side / s.efficiency;
    sol.transferred_kw[s.converter] += ac_side;
    if (!s.generator.empty()) sol.source_kw[s.generator] += ac_side;
    sol.losses_kw += ac_side - dc_side;
    supplied += ac_side;
  }
  sol.residual_kw = supplied - problem.demand_kw - sol.losses_kw;
  if (std::abs(sol.residual_kw) > tol_kw + 1e-12 * supplied) {
    throw NumericalError("DC balance residual above tolerance");
  }
  return sol;
}

DcBalanceSolution solve_dc_balance(const grid::GridModel& g, const std::map<std::string, double>& inverter_output_kw) {
  grid::BusGraph graph(g);
  auto labels = graph.component_labels();
  auto label_of = [&](const std::string& bus) { return labels[graph.index(bus)]; };

  std::set<std::size_t> islands;
  for (const auto& b : g.buses) {
    if (b.kind == grid::BusKind::DC) islands.insert(label_of(b.id));
  }

  DcBalanceSolution total;
  for (std::size_t island : islands) {
    DcBalanceProblem problem;
    std::vector<const grid::BatterySource*> batteries;
    for (const auto& bat : g.batteries) {
      if (label_of(bat.bus) == island) batteries.push_back(&bat);
    }
    for (const auto& conv : g.converters) {
      if (conv.dc_bus.empty() || label_of(conv.dc_bus) != island) continue;
      if (conv.kind == grid::ConverterKind::Charger) {
        if (conv.ac_bus.empty()) continue;
        // AC-side capability: the charger rating, capped by the online machines behind it.
        double gen_kw = 0.0;
        std::string gen_id;
        std::size_t chargers_on_ac = 0;
        for (const auto& c : g.converters) {
          if (c.kind == grid::ConverterKind::Charger && !c.ac_bus.empty() && label_of(c.ac_bus) == label_of(conv.ac_bus)) {
            ++chargers_on_ac;
          }
        }
        for (const auto& gen : g.generators) {
          if (gen.online && label_of(gen.bus) == label_of(conv.ac_bus)) {
            gen_kw += gen.rated_kw;
            if (gen_id.empty()) gen_id = gen.id;
          }
        }
        if (gen_kw <= 0.0) continue;
        double cap = gen_kw / static_cast<double>(chargers_on_ac);
        if (conv.rated_kw > 0.0) cap = std::min(cap, conv.rated_kw);
        problem.sources.push_back({conv.id, gen_id, cap, conv.efficiency});
      } else if (conv.kind == grid::ConverterKind::Inverter || conv.kind == grid::ConverterKind::GridInverter) {
        auto it = inverter_output_kw.find(conv.id);
        double out = it != inverter_output_kw.end() ? it->second : load_based_output(g, conv, graph);
        // Positive output draws from the DC side; negative output (charging) feeds it.
        problem.demand_kw += out >= 0.0 ? out / conv.efficiency : out * conv.efficiency;
      }
    }
    if (problem.sources.empty()) {
      // Battery-only island: the batteries cover the demand, evenly.
      if (problem.demand_kw > 0.0 && batteries.empty()) {
        throw InputError("DC island without an online source cannot cover " + std::to_string(problem.demand_kw) +
                         " kW");
      }
      for (const auto* bat : batteries) total.source_kw[bat->id] += problem.demand_kw / batteries.size();
      total.demand_kw += problem.demand_kw;
      continue;
    }
    if (problem.demand_kw < 0.0) problem.demand_kw = 0.0;
    auto sol = solve_dc_balance(problem);
    for (const auto& [k, v] : sol.transferred_kw) total.transferred_kw[k] += v;
    for (const auto& [k, v] : sol.source_kw) total.source_kw[k] += v;
    total.demand_kw += sol.demand_kw;
    total.losses_kw += sol.losses_kw;
    total.residual_kw += sol.residual_kw;
  }
  return total;
}

}  // namespace vessel::powerflow
