#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vessel/grid/model.hpp"
#include "vessel/protection/tcc.hpp"
#include "vessel/protection/zsi.hpp"
#include "vessel/sc/ac.hpp"

namespace vessel::protection {

struct TripEvent {
  std::string breaker;
  double time = 0.0;  ///< s
  TripCause cause = TripCause::ShortTime;
  bool locked = false;
};

struct SequenceOptions {
  bool zsi_enabled = true;
  std::vector<std::string> failed;  ///< breakers forced to stay closed
};

struct SequenceResult {
  std::vector<TripEvent> events;      ///< ascending time, then breaker id
  std::vector<std::string> intended;  ///< nearest breakers
  BreakerGraph graph;
  ZsiResult zsi;
};

/// Throws InputError when no breaker detects the fault.
SequenceResult sequence_of_operations(const grid::GridModel& grid, const sc::FaultSummary& summary,
                                      const SequenceOptions& options = {});

struct EventMargin {
  std::string breaker;
  double margin;  ///< s, budget - trip time
};

struct SelectivityReport {
  bool selective = false;
  bool cleared_within_cct = false;
  double first_trip = 0.0;
  double margin = 0.0;  ///< budget - first trip
  std::vector<EventMargin> margins;
  std::vector<std::string> failures;
};

/// Selective when every intended breaker trips before any other breaker.
/// Without an explicit intended set the unlocked events are the intended ones.
SelectivityReport selectivity_check(const std::vector<TripEvent>& events, double cct_budget,
                                    const std::vector<std::string>& intended = {});

}  // namespace vessel::protection
