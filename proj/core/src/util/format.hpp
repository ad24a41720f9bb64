#pragma once

#include <string>

namespace vessel::util {

/// Shortest decimal text that parses back to exactly `value`; '.' separator,
/// never scientific notation for finite values.
std::string shortest(double value);

/// shortest() padded to at least two fractional digits (grid-file style).
std::string shortest_min2(double value);

}  // namespace vessel::util
