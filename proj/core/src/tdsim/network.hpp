#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "powerflow/network_model.hpp"
#include "vessel/grid/model.hpp"

namespace vessel::tdsim {

using powerflow::cplx;

/// Fault state of the network: a bolted bus fault or a bolted fault part-way along a branch.
struct FaultState {
  std::string bus;
  std::optional<std::size_t> branch;  ///< index into grid.branches
  double location = 0.0;
};

/// Voltage behind an admittance (machine E' behind X'd).
struct NortonSource {
  std::size_t node;
  cplx y;
  cplx e;
};

/// Fixed node voltage (infinite bus, grid-forming converter).
struct FixedVoltage {
  std::size_t node;
  cplx v;
};

/// Constant-power element; `s` > 0 consumes. Becomes constant impedance below 0.7 pu.
struct PowerElement {
  std::size_t node;
  cplx s;
};

inline constexpr double kConstantPowerMinVoltage = 0.7;

/// Current drawn by a constant-power element at voltage v.
cplx element_current(cplx s, cplx v);

/// Quasi-static AC network for the time-domain engine: merged nodes of the
/// current switch state, branch admittances in per-unit, fault shunts.
class Network {
 public:
  /// `grid` carries the current breaker states.
  Network(const grid::GridModel& grid, const FaultState* fault);

  const powerflow::PuNetwork& pu() const { return net_; }
  std::size_t node(const grid::GridModel& grid, const std::string& bus) const { return net_.node(grid, bus); }
  std::size_t size() const { return net_.map.node_count; }

  /// Island label per node after the fault split; AC nodes only.
  const std::vector<std::size_t>& island() const { return island_; }

  /// Solves the node voltages by fixed-point sweeps. `v` is the warm start and
  /// the result. `max_iter` = 1 is a single linear solve with element currents
  /// taken at the warm-start voltages.
  void solve(const std::vector<NortonSource>& machines, const std::vector<FixedVoltage>& fixed,
             const std::vector<PowerElement>& elements, std::vector<cplx>& v, double tol, int max_iter);

  /// Net current leaving each node into the branch/fault network.
  std::vector<cplx> network_currents(const std::vector<cplx>& v) const;

  /// Real power absorbed by branches and fault shunts, pu.
  double losses(const std::vector<cplx>& v) const;

 private:
  void factor(const std::vector<NortonSource>& machines, const std::vector<FixedVoltage>& fixed);

  powerflow::PuNetwork net_;
  Eigen::MatrixXcd ynet_;
  std::vector<std::size_t> island_;
  std::optional<std::size_t> fault_node_;
  // Cached factorization for one set of machine/fixed nodes.
  std::vector<std::size_t> key_;
  std::vector<Eigen::Index> unknown_;   // node -> position among unknowns, -1 if fixed/dead
  std::vector<std::size_t> unknown_nodes_;
  std::vector<bool> dead_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
  Eigen::MatrixXcd y_ud_;
  std::vector<std::size_t> fixed_nodes_;
};

}  // namespace vessel::tdsim
