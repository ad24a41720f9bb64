#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vessel/grid/model.hpp"
#include "vessel/tdsim/simulate.hpp"

namespace vessel::tdsim {

struct CctFault {
  std::string machine;
  double loading = 0.9;   ///< fraction of rated kW
  double location = 0.0;  ///< fraction along `branch` from its from end
  /// Faulted branch; when empty, the branch at the machine bus is used if
  /// location > 0, else the fault is on the machine bus itself.
  std::string branch;
};

struct CctOptions {
  double fault_time = 0.1;    ///< s, fault inception
  double post_window = 3.0;   ///< s simulated after clearing
  SimConfig sim;              ///< step/integrator for the probes; end and stop_angle are set per probe
};

struct CctProbe {
  double clearing;  ///< s, fault duration
  bool stable;
  double max_separation;  ///< rad
};

struct CctResult {
  double cct = 0.0;  ///< largest clearing time proven stable
  double lo = 0.0;
  double hi = 0.0;
  std::vector<CctProbe> transcript;
  bool monotone = true;  ///< every stable probe is shorter than every unstable one
};

/// Stability of one clearing time; `clearing` 0 applies no fault.
CctProbe probe_clearing(const grid::GridModel& grid, const CctFault& fault, double clearing,
                        const CctOptions& options = {});

/// Bisection on the fault duration. Throws NumericalError if the bracket is
/// not (stable, unstable).
CctResult find_cct(const grid::GridModel& grid, const CctFault& fault, double t_lo, double t_hi, double tol,
                   const CctOptions& options = {});

/// Grid with the machine dispatched at `loading` x rated kW and a slack chosen elsewhere.
grid::GridModel dispatch_for_cct(const grid::GridModel& grid, const CctFault& fault);

}  // namespace vessel::tdsim
