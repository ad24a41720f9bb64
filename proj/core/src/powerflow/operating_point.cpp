#include "vessel/powerflow/operating_point.hpp"

#include <algorithm>
#include <cmath>

#include "vessel/error.hpp"
#include "vessel/grid/model.hpp"
#include "vessel/powerflow/ac.hpp"

namespace vessel::powerflow {

OperatingPoint make_operating_point(double u0, double p_kw, double q_kvar) {
  if (!(u0 > 0.0)) throw InputError("operating point needs u0 > 0");
  const double s = std::hypot(p_kw, q_kvar);
  OperatingPoint op;
  op.u0 = u0;
  op.i0 = s * 1000.0 / (grid::kSqrt3 * u0);
  op.phi0 = s > 0.0 ? std::acos(std::clamp(std::abs(p_kw) / s, 0.0, 1.0)) : 0.0;
  return op;
}

OperatingPoint prefault_operating_point(const PowerflowSolution& sol, const std::string& machine_id,
                                        double nominal_voltage) {
  const ElementResult* e = sol.find_element(machine_id);
  if (!e) throw InputError("machine '" + machine_id + "' is not in the power-flow solution");
  if (!e->online) throw InputError("machine '" + machine_id + "' is offline");
  const BusResult* b = sol.find_bus(e->bus);
  if (!b || !b->energized) throw InputError("machine '" + machine_id + "' sits on a de-energized bus");
  return make_operating_point(b->v_pu * nominal_voltage, e->p_kw, e->q_kvar);
}

}  // namespace vessel::powerflow
