#pragma once

#include <string>
#include <vector>

#include "vessel/grid/model.hpp"

namespace vessel::grid {

struct Violation {
  std::string element;
  std::string rule;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(const std::string& element, const std::string& rule) const;
  std::string to_string() const;
};

/// Checks every type invariant and the grid's referential integrity.
/// Violations are data; validate never throws.
ValidationReport validate(const GridModel& grid);

}  // namespace vessel::grid
