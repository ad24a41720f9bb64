#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vessel/grid/model.hpp"

namespace vessel::powerflow {

struct PowerflowOptions {
  double tol = 1e-8;  ///< per-unit mismatch on the system base
  int max_iter = 30;
  std::optional<std::string> slack;  ///< generator id overriding the default choice
};

struct BusResult {
  std::string bus;
  double v_pu = 0.0;
  double angle = 0.0;  ///< rad
  double p_kw = 0.0;   ///< net injection
  double q_kvar = 0.0;
  bool energized = false;
};

struct ElementResult {
  std::string element;
  std::string bus;
  double p_kw = 0.0;  ///< injection into the bus (loads negative)
  double q_kvar = 0.0;
  bool online = false;
};

struct PowerflowSolution {
  std::vector<BusResult> buses;
  std::vector<ElementResult> elements;
  std::vector<std::string> slack_elements;  ///< one per energized AC island
  int iterations = 0;                        ///< max over islands
  double max_mismatch = 0.0;                 ///< pu
  double losses_kw = 0.0;
  double base_mva = 1.0;
  std::map<std::string, double> dc_transfer_kw;  ///< charger AC input from the DC balance

  const BusResult* find_bus(const std::string& id) const;
  const ElementResult* find_element(const std::string& id) const;
};

/// Newton-Raphson load flow per AC island, constant-power loads, flat start.
/// Islands fed only by converters use the converter as grid-forming slack;
/// generator islands then see chargers as loads sized by the DC balance.
PowerflowSolution solve_ac_powerflow(const grid::GridModel& grid, const PowerflowOptions& options = {});

}  // namespace vessel::powerflow
