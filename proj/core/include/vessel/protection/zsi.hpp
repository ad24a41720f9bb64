#pragma once

#include <string>
#include <vector>

#include "vessel/grid/model.hpp"
#include "vessel/sc/ac.hpp"

namespace vessel::protection {

/// Fault current seen by one closed breaker.
struct BreakerFlow {
  std::string breaker;
  double current = 0.0;  ///< A at the breaker voltage, sum of contributor Iac(T/2)
  bool forward = true;   ///< current flows from -> to
  std::vector<std::string> contributors;
  /// Breakers between this one and the fault, nearest to this breaker first.
  std::vector<std::string> toward_fault;
};

struct BreakerGraph {
  std::string fault_bus;
  std::vector<BreakerFlow> flows;  ///< grid order, only breakers carrying current

  const BreakerFlow* find(std::string_view breaker) const;
};

/// Routes every contributor's half-cycle current along its path to the fault.
/// The energized network around the fault must be radial; a mesh is an InputError.
BreakerGraph build_breaker_graph(const grid::GridModel& grid, const sc::FaultSummary& summary);

struct LockSignal {
  std::string from;
  std::string to;
};

struct ZsiResult {
  std::vector<std::string> detecting;
  std::vector<std::string> nearest;
  std::vector<std::string> locked;
  std::vector<LockSignal> trace;
};

/// Breakers that detect the fault with no other detecting breaker between
/// them and the fault lock all others. A lock reaches each breaker from the
/// next detecting breaker on its way to the fault, so ties forward it upstream.
ZsiResult apply_zsi(const grid::GridModel& grid, const BreakerGraph& graph);

}  // namespace vessel::protection
