#include "vessel/grid/topology.hpp"

#include <deque>
#include <numeric>

#include "vessel/error.hpp"

namespace vessel::grid {

BusGraph::BusGraph(const GridModel& grid) : grid_(&grid), incident_(grid.buses.size()) {
  auto add = [&](EdgeType type, std::size_t element, const std::string& from, const std::string& to) {
    Edge e{type, element, index(from), index(to)};
    incident_[e.a].push_back(edges_.size());
    incident_[e.b].push_back(edges_.size());
    edges_.push_back(e);
  };
  for (std::size_t i = 0; i < grid.branches.size(); ++i) {
    add(EdgeType::Branch, i, grid.branches[i].from, grid.branches[i].to);
  }
  for (std::size_t i = 0; i < grid.breakers.size(); ++i) {
    if (grid.breakers[i].closed()) add(EdgeType::Breaker, i, grid.breakers[i].from, grid.breakers[i].to);
  }
}

std::size_t BusGraph::index(std::string_view bus) const {
  for (std::size_t i = 0; i < grid_->buses.size(); ++i) {
    if (grid_->buses[i].id == bus) return i;
  }
  throw InputError("dangling reference: bus '" + std::string(bus) + "' is not declared");
}

std::vector<std::size_t> BusGraph::reachable(std::size_t start) const {
  std::vector<bool> seen(size(), false);
  std::vector<std::size_t> order;
  std::deque<std::size_t> queue{start};
  seen[start] = true;
  while (!queue.empty()) {
    std::size_t n = queue.front();
    queue.pop_front();
    order.push_back(n);
    for (std::size_t e : incident_[n]) {
      std::size_t m = edges_[e].other(n);
      if (!seen[m]) {
        seen[m] = true;
        queue.push_back(m);
      }
    }
  }
  return order;
}

std::vector<std::size_t> BusGraph::component_labels() const {
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> label(size(), unset);
  std::size_t next = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    if (label[i] != unset) continue;
    for (std::size_t n : reachable(i)) label[n] = next;
    ++next;
  }
  return label;
}

std::size_t BusGraph::component_count() const {
  auto labels = component_labels();
  std::size_t count = 0;
  for (std::size_t l : labels) count = std::max(count, l + 1);
  return count;
}

NodeMap merge_closed_breakers(const GridModel& grid) {
  std::vector<std::size_t> parent(grid.buses.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  BusGraph g(grid);
  for (const auto& e : g.edges()) {
    if (e.type == BusGraph::EdgeType::Breaker) parent[find(e.a)] = find(e.b);
  }
  NodeMap map;
  map.node_of_bus.assign(grid.buses.size(), 0);
  std::vector<std::size_t> node_of_root(grid.buses.size(), static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < grid.buses.size(); ++i) {
    std::size_t r = find(i);
    if (node_of_root[r] == static_cast<std::size_t>(-1)) node_of_root[r] = map.node_count++;
    map.node_of_bus[i] = node_of_root[r];
  }
  return map;
}

}  // namespace vessel::grid
