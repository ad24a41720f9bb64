#pragma once

#include <string>
#include <vector>

#include "vessel/grid/model.hpp"

namespace vessel::tdsim {

enum class Action { LoadStep, BreakerOpen, BreakerClose, FaultApply, FaultClear };

std::string_view to_string(Action a);

struct Event {
  double time = 0.0;  ///< s
  Action action = Action::LoadStep;
  std::string target;     ///< load, breaker, bus or branch id; empty for fault_clear
  double scale = 1.0;     ///< load_step: demand multiplier relative to the initial demand
  double ramp = 0.0;      ///< load_step: s, 0 = step
  double location = 0.0;  ///< fault_apply on a branch: fraction from the `from` end
};

struct EventSchedule {
  std::vector<Event> events;

  /// Times non-decreasing, ids present, fractions in [0, 1]. Throws InputError.
  void validate(const grid::GridModel& grid) const;
};

Event load_step(double t, std::string load, double scale, double ramp = 0.0);
Event breaker_open(double t, std::string breaker);
Event breaker_close(double t, std::string breaker);
Event fault_apply(double t, std::string bus_or_branch, double location = 0.0);
Event fault_clear(double t);

}  // namespace vessel::tdsim
