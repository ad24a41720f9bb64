#pragma once

#include <optional>
#include <span>
#include <string>

#include "vessel/grid/model.hpp"
#include "vessel/sc/dc.hpp"

namespace vessel::protection {

struct FuseResult {
  std::string fuse;
  double rating = 0.0;            ///< A^2 s
  std::optional<double> t_clear;  ///< s; none = NOT_CLEARED
  double let_through = 0.0;       ///< A^2 s at clearing, or over the whole trace

  bool cleared() const { return t_clear.has_value(); }
};

/// Running trapezoidal integral of i^2, same length as `t`.
std::vector<double> cumulative_i2t(std::span<const double> t, std::span<const double> i);

/// First time the let-through energy reaches the fuse rating, linearly
/// interpolated inside the step. A trace that ends below the rating while the
/// current is still flowing is an InputError.
FuseResult fuse_i2t_clearing(std::span<const double> t, std::span<const double> i, const grid::FuseSpec& fuse);
FuseResult fuse_i2t_clearing(const sc::DcScTrace& trace, const grid::FuseSpec& fuse);

}  // namespace vessel::protection
