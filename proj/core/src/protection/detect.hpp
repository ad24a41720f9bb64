#pragma once

#include <optional>

#include "vessel/protection/tcc.hpp"
#include "vessel/protection/zsi.hpp"

namespace vessel::protection {

/// TCC evaluation including the breaker-level direction restriction.
std::optional<ElementTrip> breaker_trip(const grid::BreakerSpec& b, const BreakerFlow& flow);

}  // namespace vessel::protection
