#include "vessel/protection/fuse.hpp"

#include <algorithm>
#include <cmath>

#include "vessel/error.hpp"

namespace vessel::protection {

std::vector<double> cumulative_i2t(std::span<const double> t, std::span<const double> i) {
  if (t.size() != i.size()) throw InputError("i2t: time and current lengths differ");
  std::vector<double> e(t.size(), 0.0);
  for (std::size_t k = 1; k < t.size(); ++k) {
    const double dt = t[k] - t[k - 1];
    if (!(dt > 0.0)) throw InputError("i2t: time grid must be strictly increasing");
    e[k] = e[k - 1] + 0.5 * dt * (i[k - 1] * i[k - 1] + i[k] * i[k]);
  }
  return e;
}

FuseResult fuse_i2t_clearing(std::span<const double> t, std::span<const double> i, const grid::FuseSpec& fuse) {
  if (!(fuse.i2t_total_clearing > 0.0)) throw InputError("fuse '" + fuse.id + "' needs i2t > 0");
  if (t.size() < 2) throw InputError("i2t: trace needs at least two samples");
  const auto e = cumulative_i2t(t, i);
  FuseResult r{fuse.id, fuse.i2t_total_clearing, std::nullopt, e.back()};
  const double rating = fuse.i2t_total_clearing;
  auto hit = std::find_if(e.begin(), e.end(), [&](double v) { return v >= rating; });
  if (hit != e.end()) {
    const auto k = static_cast<std::size_t>(hit - e.begin());
    r.let_through = rating;
    r.t_clear = k == 0 ? t[0] : t[k - 1] + (rating - e[k - 1]) / (e[k] - e[k - 1]) * (t[k] - t[k - 1]);
    return r;
  }
  double peak = 0.0;
  for (double v : i) peak = std::max(peak, std::abs(v));
  if (std::abs(i.back()) > 1e-3 * peak) {
    throw InputError("i2t: trace too short for fuse '" + fuse.id + "', current still flowing at the end and " +
                     "let-through below the rating");
  }
  return r;
}

FuseResult fuse_i2t_clearing(const sc::DcScTrace& trace, const grid::FuseSpec& fuse) {
  return fuse_i2t_clearing(trace.t, trace.i, fuse);
}

}  // namespace vessel::protection
