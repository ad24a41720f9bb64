#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "vessel/grid/model.hpp"
#include "vessel/grid/topology.hpp"

namespace vessel::powerflow {

using cplx = std::complex<double>;

/// Branch series admittance in per-unit on the system base.
struct PuBranch {
  std::size_t element;  ///< index into grid.branches
  std::size_t from;     ///< electrical node
  std::size_t to;
  cplx y;
  double z_base;        ///< ohm, from-side base impedance
};

/// AC network after merging closed breakers, in per-unit.
struct PuNetwork {
  grid::NodeMap map;
  std::vector<double> node_voltage;  ///< V, nominal
  std::vector<bool> node_dc;
  std::vector<PuBranch> branches;    ///< AC branches only
  std::vector<std::size_t> island;   ///< per node, AC islands joined by branches
  std::size_t island_count = 0;
  double base_mva = 1.0;

  std::size_t node(const grid::GridModel& g, const std::string& bus) const;
  /// kVA per unit
  double kva_base() const { return base_mva * 1000.0; }
};

PuNetwork build_pu_network(const grid::GridModel& grid);

}  // namespace vessel::powerflow
