#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "vessel/grid/model.hpp"

namespace vessel::grid {

/// Undirected bus graph over branches and closed breakers.
class BusGraph {
 public:
  enum class EdgeType { Branch, Breaker };

  struct Edge {
    EdgeType type;
    std::size_t element;  ///< index into grid.branches or grid.breakers
    std::size_t a;        ///< bus index of `from`
    std::size_t b;        ///< bus index of `to`

    std::size_t other(std::size_t node) const { return node == a ? b : a; }
  };

  explicit BusGraph(const GridModel& grid);

  std::size_t size() const { return incident_.size(); }
  std::size_t index(std::string_view bus) const;
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::size_t>& incident(std::size_t node) const { return incident_[node]; }

  /// Component label per bus; buses joined by closed breakers or branches share a label.
  std::vector<std::size_t> component_labels() const;
  std::size_t component_count() const;

  /// Buses reachable from `start`, including `start`, in BFS order.
  std::vector<std::size_t> reachable(std::size_t start) const;

 private:
  const GridModel* grid_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> incident_;
};

/// Electrical nodes after merging buses tied by closed breakers.
struct NodeMap {
  std::vector<std::size_t> node_of_bus;  ///< bus index -> node index
  std::size_t node_count = 0;
};

NodeMap merge_closed_breakers(const GridModel& grid);

}  // namespace vessel::grid
