#include "powerflow/network_model.hpp"

#include <numeric>

#include "vessel/error.hpp"

namespace vessel::powerflow {

std::size_t PuNetwork::node(const grid::GridModel& g, const std::string& bus) const {
  for (std::size_t i = 0; i < g.buses.size(); ++i) {
    if (g.buses[i].id == bus) return map.node_of_bus[i];
  }
  throw InputError("dangling reference: bus '" + bus + "' is not declared");
}

PuNetwork build_pu_network(const grid::GridModel& g) {
  PuNetwork net;
  net.base_mva = g.base_mva;
  net.map = grid::merge_closed_breakers(g);
  net.node_voltage.assign(net.map.node_count, 0.0);
  net.node_dc.assign(net.map.node_count, false);
  for (std::size_t i = 0; i < g.buses.size(); ++i) {
    std::size_t n = net.map.node_of_bus[i];
    net.node_voltage[n] = g.buses[i].nominal_voltage;
    net.node_dc[n] = g.buses[i].kind == grid::BusKind::DC;
  }

  std::vector<std::size_t> parent(net.map.node_count);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t k = 0; k < g.branches.size(); ++k) {
    const auto& b = g.branches[k];
    std::size_t f = net.node(g, b.from);
    std::size_t t = net.node(g, b.to);
    if (net.node_dc[f] || net.node_dc[t]) continue;
    if (f == t) continue;  // shorted by a closed breaker
    const double v = net.node_voltage[f];
    const double zb = v * v / (g.base_mva * 1e6);
    net.branches.push_back({k, f, t, 1.0 / cplx(b.resistance / zb, b.reactance / zb), zb});
    parent[find(f)] = find(t);
  }
  net.island.assign(net.map.node_count, 0);
  std::vector<std::size_t> label(net.map.node_count, static_cast<std::size_t>(-1));
  for (std::size_t n = 0; n < net.map.node_count; ++n) {
    std::size_t r = find(n);
    if (label[r] == static_cast<std::size_t>(-1)) label[r] = net.island_count++;
    net.island[n] = label[r];
  }
  return net;
}

}  // namespace vessel::powerflow
