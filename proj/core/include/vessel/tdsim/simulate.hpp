#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vessel/grid/model.hpp"
#include "vessel/tdsim/controllers.hpp"
#include "vessel/tdsim/events.hpp"

namespace vessel::tdsim {

enum class Integrator { Rk4, Trapezoidal };

struct SimConfig {
  double step = 1e-3;  ///< s
  double end = 10.0;   ///< s
  Integrator integrator = Integrator::Rk4;
  /// Full (iterated) network solve every N steps; in between, load currents are
  /// frozen and only the linear network is re-solved.
  int network_interval = 1;
  double network_tol = 1e-10;  ///< pu voltage change between fixed-point sweeps
  int network_max_iter = 200;
  /// Stop once the rotor-angle separation in any island exceeds this (rad); 0 never stops.
  double stop_angle = 0.0;
  std::optional<std::string> slack;  ///< initial power-flow slack override

  void validate() const;
};

struct TimeSeries {
  std::vector<double> t;
  std::vector<std::string> names;
  std::vector<std::vector<double>> data;  ///< one vector per channel, same length as t
  bool stopped_early = false;
  double max_angle_separation = 0.0;  ///< rad, over the run

  bool has(const std::string& name) const;
  const std::vector<double>& channel(const std::string& name) const;  ///< throws InputError
};

/// Classical-machine stability simulation of the AC islands.
TimeSeries simulate(const grid::GridModel& grid, const EventSchedule& schedule,
                    const std::vector<ControllerConfig>& controllers, const SimConfig& cfg);

}  // namespace vessel::tdsim
