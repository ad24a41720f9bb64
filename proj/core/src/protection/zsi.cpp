#include "vessel/protection/zsi.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "protection/detect.hpp"
#include "vessel/error.hpp"
#include "vessel/grid/topology.hpp"

namespace vessel::protection {
namespace {

constexpr auto kNone = std::numeric_limits<std::size_t>::max();

std::string contributor_bus(const grid::GridModel& g, const std::string& id) {
  if (const auto* gen = g.find_generator(id)) return gen->bus;
  if (const auto* l = g.find_load(id)) return l->bus;
  if (const auto* c = g.find_converter(id)) return c->ac_bus;
  throw InputError("fault summary names unknown contributor '" + id + "'");
}

}  // namespace

const BreakerFlow* BreakerGraph::find(std::string_view breaker) const {
  auto it = std::find_if(flows.begin(), flows.end(), [&](const BreakerFlow& f) { return f.breaker == breaker; });
  return it == flows.end() ? nullptr : &*it;
}

std::optional<ElementTrip> breaker_trip(const grid::BreakerSpec& b, const BreakerFlow& flow) {
  if (b.directional && !flow.forward) return std::nullopt;
  return evaluate_tcc(b.tcc, flow.current, flow.forward);
}

BreakerGraph build_breaker_graph(const grid::GridModel& grid, const sc::FaultSummary& summary) {
  const grid::BusGraph graph(grid);
  const std::size_t root = graph.index(summary.bus);

  // BFS tree rooted at the fault; a second route to a visited bus is a mesh.
  std::vector<std::size_t> parent_edge(graph.size(), kNone);
  std::vector<bool> seen(graph.size(), false);
  std::vector<std::size_t> queue{root};
  seen[root] = true;
  std::vector<bool> used(graph.edges().size(), false);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto n = queue[head];
    for (auto e : graph.incident(n)) {
      if (used[e]) continue;
      used[e] = true;
      const auto m = graph.edges()[e].other(n);
      if (seen[m]) throw InputError("protection needs a radial network around '" + summary.bus + "'; found a mesh");
      seen[m] = true;
      parent_edge[m] = e;
      queue.push_back(m);
    }
  }

  const double v_fault = grid.bus(summary.bus).nominal_voltage;
  std::map<std::size_t, BreakerFlow> flows;  // by breaker index
  for (const auto& hc : summary.half_cycle) {
    std::size_t n = graph.index(contributor_bus(grid, hc.contributor));
    if (!seen[n]) continue;
    std::vector<std::size_t> path;
    while (n != root) {
      const auto& e = graph.edges()[parent_edge[n]];
      if (e.type == grid::BusGraph::EdgeType::Breaker) {
        const auto& b = grid.breakers[e.element];
        auto& f = flows[e.element];
        f.breaker = b.id;
        f.current += hc.iac * v_fault / grid.bus(b.from).nominal_voltage;
        f.forward = n == e.a;
        f.contributors.push_back(hc.contributor);
      }
      n = e.other(n);
    }
  }

  BreakerGraph out;
  out.fault_bus = summary.bus;
  for (auto& [idx, f] : flows) {
    // Breakers toward the fault: walk from the breaker's fault-side bus.
    const auto& b = grid.breakers[idx];
    const auto a = graph.index(b.from), z = graph.index(b.to);
    std::size_t n = f.forward ? z : a;
    while (n != root) {
      const auto& e = graph.edges()[parent_edge[n]];
      if (e.type == grid::BusGraph::EdgeType::Breaker) f.toward_fault.push_back(grid.breakers[e.element].id);
      n = e.other(n);
    }
    out.flows.push_back(std::move(f));
  }
  return out;
}

ZsiResult apply_zsi(const grid::GridModel& grid, const BreakerGraph& graph) {
  ZsiResult r;
  for (const auto& f : graph.flows) {
    if (breaker_trip(*grid.find_breaker(f.breaker), f)) r.detecting.push_back(f.breaker);
  }
  auto detecting = [&](const std::string& id) {
    return std::find(r.detecting.begin(), r.detecting.end(), id) != r.detecting.end();
  };
  for (const auto& id : r.detecting) {
    const auto& f = *graph.find(id);
    auto sender = std::find_if(f.toward_fault.begin(), f.toward_fault.end(), detecting);
    if (sender == f.toward_fault.end()) {
      r.nearest.push_back(id);
    } else {
      r.locked.push_back(id);
      r.trace.push_back({*sender, id});
    }
  }
  return r;
}

}  // namespace vessel::protection
