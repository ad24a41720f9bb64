#pragma once

#include <vector>

namespace vessel::sc {

/// Default AC short-circuit grid: 10 us steps to 50 ms, then 1 ms steps to 1 s.
std::vector<double> default_ac_time_grid();

/// Default DC fault grid: 0 to 5 ms in 0.5 us steps.
std::vector<double> default_dc_time_grid();

/// Uniform grid [start, end] with the given step; the last point is `end`.
std::vector<double> uniform_time_grid(double start, double end, double step);

}  // namespace vessel::sc
