#pragma once

#include <optional>
#include <string_view>

#include "vessel/grid/model.hpp"

namespace vessel::protection {

enum class TripCause { ShortTime, LongTime, ZsiBackup };

std::string_view to_string(TripCause c);

struct ElementTrip {
  double time;  ///< s
  TripCause cause;
};

/// Fastest element of the curve that picks up. An inverse long-time element
/// exactly at pickup does not trip. Directional elements only operate when
/// `direction_matches`.
std::optional<ElementTrip> evaluate_tcc(const grid::TccCurve& curve, double current, bool direction_matches);

/// Trip time in seconds, or none.
std::optional<double> trip_time(const grid::TccCurve& curve, double current, bool direction_matches);

}  // namespace vessel::protection
