#include "vessel/tdsim/events.hpp"

#include <cmath>

#include "vessel/error.hpp"

namespace vessel::tdsim {

std::string_view to_string(Action a) {
  switch (a) {
    case Action::LoadStep: return "load_step";
    case Action::BreakerOpen: return "breaker_open";
    case Action::BreakerClose: return "breaker_close";
    case Action::FaultApply: return "fault_apply";
    case Action::FaultClear: return "fault_clear";
  }
  return "?";
}

void EventSchedule::validate(const grid::GridModel& grid) const {
  double last = 0.0;
  bool fault_on = false;
  for (const auto& e : events) {
    if (!std::isfinite(e.time) || e.time < 0.0) throw InputError("event time must be >= 0");
    if (e.time < last) throw InputError("event times must be non-decreasing");
    last = e.time;
    switch (e.action) {
      case Action::LoadStep:
        if (!grid.find_load(e.target)) throw InputError("dangling reference: load_step names no load '" + e.target + "'");
        if (e.scale < 0.0 || e.ramp < 0.0) throw InputError("load_step needs scale >= 0 and ramp >= 0");
        break;
      case Action::BreakerOpen:
      case Action::BreakerClose:
        if (!grid.find_breaker(e.target)) throw InputError("dangling reference: no breaker '" + e.target + "'");
        break;
      case Action::FaultApply:
        if (fault_on) throw InputError("only one fault may be applied at a time");
        fault_on = true;
        if (grid.find_bus(e.target)) {
          if (grid.find_bus(e.target)->kind != grid::BusKind::AC) throw InputError("fault bus must be AC");
        } else if (!grid.find_branch(e.target)) {
          throw InputError("dangling reference: fault target '" + e.target + "' is neither bus nor branch");
        }
        if (!(e.location >= 0.0 && e.location <= 1.0)) throw InputError("fault location must lie in [0, 1]");
        break;
      case Action::FaultClear:
        if (!fault_on) throw InputError("fault_clear without an applied fault");
        fault_on = false;
        break;
    }
  }
}

Event load_step(double t, std::string load, double scale, double ramp) {
  return {t, Action::LoadStep, std::move(load), scale, ramp, 0.0};
}
Event breaker_open(double t, std::string breaker) { return {t, Action::BreakerOpen, std::move(breaker)}; }
Event breaker_close(double t, std::string breaker) { return {t, Action::BreakerClose, std::move(breaker)}; }
Event fault_apply(double t, std::string target, double location) {
  return {t, Action::FaultApply, std::move(target), 1.0, 0.0, location};
}
Event fault_clear(double t) { return {t, Action::FaultClear, {}}; }

}  // namespace vessel::tdsim
