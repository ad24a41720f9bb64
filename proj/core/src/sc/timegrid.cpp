#include "vessel/sc/timegrid.hpp"

#include <cmath>

#include "vessel/error.hpp"

namespace vessel::sc {

std::vector<double> uniform_time_grid(double start, double end, double step) {
  if (!(step > 0.0) || !(end >= start)) throw InputError("time grid needs step > 0 and end >= start");
  // Index-based so the points carry no accumulated rounding.
  auto n = static_cast<std::size_t>(std::llround((end - start) / step));
  std::vector<double> t;
  t.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) t.push_back(start + static_cast<double>(k) * step);
  if (t.back() != end) t.back() = end;
  return t;
}

std::vector<double> default_ac_time_grid() {
  auto t = uniform_time_grid(0.0, 0.05, 10e-6);
  for (int k = 51; k <= 1000; ++k) t.push_back(k * 1e-3);
  return t;
}

std::vector<double> default_dc_time_grid() { return uniform_time_grid(0.0, 5e-3, 0.5e-6); }

}  // namespace vessel::sc
