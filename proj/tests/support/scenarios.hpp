#pragma once

#include <string>
#include <vector>

#include "vessel/grid/model.hpp"
#include "vessel/tdsim/controllers.hpp"
#include "vessel/tdsim/events.hpp"
#include "vessel/tdsim/simulate.hpp"

namespace scenarios {

/// Machine (1000 kVA, 1000 V, X'd 0.3 pu, H 3 s, no damping or controls)
/// behind a j0.2 ohm line to an infinite bus, 50 Hz, 1 MVA base.
vessel::grid::GridModel smib();

struct SmibOracle {
  double delta0;  ///< rad
  double pmax;    ///< pu
  double cct;     ///< s, equal-area result at 90 % loading
};
/// Frozen equal-area values for smib() at 90 % loading.
SmibOracle smib_oracle();

struct TdScenario {
  vessel::grid::GridModel grid;
  vessel::tdsim::EventSchedule events;
  std::vector<vessel::tdsim::ControllerConfig> controllers;
  vessel::tdsim::SimConfig sim;
};

/// ac_vessel split at both ties, DG#01 alone on the port section at ~1.41 MW
/// with the port battery inverter peak shaving at 1.5 MW; the thruster ramps
/// to 1.4x over 3 s at t = 5 s and back over 3 s at t = 10 s.
TdScenario peak_shave();

/// ac_vessel split at both ties, DG#01 + DG#02 on the port section; DG#02's
/// breaker opens at t = 2 s and the port battery inverter takes over.
TdScenario dp_failover();

/// Two-bus network: slack plus a line z = 0.01 + j0.10 pu to a 1.0 + j0.5 pu load.
vessel::grid::GridModel two_bus();

/// Reference DC-link branch: 2400 uF, 54.7 mOhm, 5.5 uH charged to 650 V.
vessel::grid::CapacitorBranch fig6_capacitor();

}  // namespace scenarios
