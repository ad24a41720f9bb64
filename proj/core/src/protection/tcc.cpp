#include "vessel/protection/tcc.hpp"

#include "vessel/error.hpp"

namespace vessel::protection {

std::string_view to_string(TripCause c) {
  switch (c) {
    case TripCause::ShortTime: return "short_time";
    case TripCause::LongTime: return "long_time";
    case TripCause::ZsiBackup: return "zsi_backup";
  }
  return "?";
}

std::optional<ElementTrip> evaluate_tcc(const grid::TccCurve& curve, double current, bool direction_matches) {
  if (!(current >= 0.0)) throw InputError("trip_time: current must be >= 0");
  std::optional<ElementTrip> best;
  auto offer = [&](double t, TripCause c) {
    if (!best || t < best->time) best = ElementTrip{t, c};
  };
  const auto& lt = curve.long_time;
  if (lt.pickup > 0.0 && current > lt.pickup) {
    if (lt.kind == grid::LongTimeKind::Definite) {
      offer(lt.delay, TripCause::LongTime);
    } else {
      const double m = current / lt.pickup;
      offer(lt.delay / (m * m - 1.0), TripCause::LongTime);
    }
  }
  const auto& st = curve.short_time;
  if (st.pickup > 0.0 && current >= st.pickup && (direction_matches || !st.directional)) {
    offer(st.delay, TripCause::ShortTime);
  }
  return best;
}

std::optional<double> trip_time(const grid::TccCurve& curve, double current, bool direction_matches) {
  if (auto e = evaluate_tcc(curve, current, direction_matches)) return e->time;
  return std::nullopt;
}

}  // namespace vessel::protection
