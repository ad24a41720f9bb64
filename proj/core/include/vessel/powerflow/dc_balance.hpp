#pragma once

#include <map>
#include <string>
#include <vector>

#include "vessel/grid/model.hpp"

namespace vessel::powerflow {

struct DcSource {
  std::string converter;
  std::string generator;
  double capability_kw = 0.0;
  double efficiency = 0.97;
};

/// Algebraic balance problem for one DC island.
struct DcBalanceProblem {
  std::vector<DcSource> sources;
  double demand_kw = 0.0;  ///< DC-side demand
};

struct DcBalanceSolution {
  std::map<std::string, double> transferred_kw;  ///< per charger, AC-side input
  std::map<std::string, double> source_kw;       ///< per generator
  double demand_kw = 0.0;
  double losses_kw = 0.0;
  double residual_kw = 0.0;
};

/// Chargers pick up the demand plus their losses, shared in proportion to capability.
DcBalanceSolution solve_dc_balance(const DcBalanceProblem& problem, double tol_kw = 1e-9);

/// Builds one problem per DC island from the loads fed through inverters
/// (each inverter stage at its own efficiency) and solves them all.
/// `inverter_output_kw` overrides the load-based inverter outputs when given.
DcBalanceSolution solve_dc_balance(const grid::GridModel& grid,
                                   const std::map<std::string, double>& inverter_output_kw = {});

}  // namespace vessel::powerflow
