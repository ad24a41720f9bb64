#include "vessel/protection/sequence.hpp"

#include <algorithm>
#include <limits>

#include "protection/detect.hpp"
#include "vessel/error.hpp"

namespace vessel::protection {

SequenceResult sequence_of_operations(const grid::GridModel& grid, const sc::FaultSummary& summary,
                                      const SequenceOptions& options) {
  for (const auto& id : options.failed) {
    if (!grid.find_breaker(id)) throw InputError("unknown failed breaker '" + id + "'");
  }
  SequenceResult r;
  r.graph = build_breaker_graph(grid, summary);
  r.zsi = apply_zsi(grid, r.graph);
  if (r.zsi.detecting.empty()) throw InputError("no breaker detects the fault at '" + summary.bus + "'");
  r.intended = r.zsi.nearest;

  for (const auto& id : r.zsi.detecting) {
    if (std::find(options.failed.begin(), options.failed.end(), id) != options.failed.end()) continue;
    const auto& b = *grid.find_breaker(id);
    const auto trip = *breaker_trip(b, *r.graph.find(id));
    const bool locked = options.zsi_enabled &&
                        std::find(r.zsi.locked.begin(), r.zsi.locked.end(), id) != r.zsi.locked.end();
    if (locked) {
      r.events.push_back({id, trip.time + b.tcc.zsi_extended_delay, TripCause::ZsiBackup, true});
    } else {
      r.events.push_back({id, trip.time, trip.cause, false});
    }
  }
  std::sort(r.events.begin(), r.events.end(), [](const TripEvent& a, const TripEvent& b) {
    return a.time != b.time ? a.time < b.time : a.breaker < b.breaker;
  });
  return r;
}

SelectivityReport selectivity_check(const std::vector<TripEvent>& events, double cct_budget,
                                    const std::vector<std::string>& intended) {
  if (events.empty()) throw InputError("selectivity check needs at least one trip event");
  std::vector<std::string> want = intended;
  if (want.empty()) {
    for (const auto& e : events) {
      if (!e.locked) want.push_back(e.breaker);
    }
  }
  auto is_intended = [&](const std::string& id) { return std::find(want.begin(), want.end(), id) != want.end(); };

  SelectivityReport r;
  double last_intended = -std::numeric_limits<double>::infinity();
  double first_backup = std::numeric_limits<double>::infinity();
  r.first_trip = std::numeric_limits<double>::infinity();
  for (const auto& e : events) {
    r.first_trip = std::min(r.first_trip, e.time);
    r.margins.push_back({e.breaker, cct_budget - e.time});
    if (is_intended(e.breaker)) last_intended = std::max(last_intended, e.time);
    else first_backup = std::min(first_backup, e.time);
  }
  for (const auto& id : want) {
    if (std::none_of(events.begin(), events.end(), [&](const TripEvent& e) { return e.breaker == id; })) {
      r.failures.push_back("intended breaker '" + id + "' does not trip");
    }
  }
  if (want.empty()) r.failures.push_back("no intended breaker");
  if (!(last_intended < first_backup)) r.failures.push_back("a backup trips no later than an intended breaker");
  r.selective = r.failures.empty();
  r.margin = cct_budget - r.first_trip;
  r.cleared_within_cct = r.first_trip <= cct_budget;
  if (!r.cleared_within_cct) r.failures.push_back("first trip exceeds the clearing-time budget");
  return r;
}

}  // namespace vessel::protection
