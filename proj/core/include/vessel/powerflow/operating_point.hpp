#pragma once

#include <string>

namespace vessel::powerflow {

struct PowerflowSolution;

/// Pre-fault machine state.
struct OperatingPoint {
  double u0 = 0.0;    ///< V line-to-line
  double i0 = 0.0;    ///< A
  double phi0 = 0.0;  ///< rad, power-factor angle
};

OperatingPoint make_operating_point(double u0, double p_kw, double q_kvar);

/// Operating point of an online machine from a solved load flow.
OperatingPoint prefault_operating_point(const PowerflowSolution& sol, const std::string& machine_id,
                                        double nominal_voltage);

}  // namespace vessel::powerflow
