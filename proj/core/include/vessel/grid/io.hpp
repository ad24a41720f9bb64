#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "vessel/grid/model.hpp"

namespace vessel::grid {

/// One `key = value` line of a sectioned file.
struct Entry {
  std::string key;
  std::string value;
  std::size_t line = 0;
  std::size_t column = 0;
};

/// A `[kind id]` block and its entries, in file order.
struct Section {
  std::string kind;
  std::string id;
  std::size_t line = 0;
  std::vector<Entry> entries;

  const Entry* find(std::string_view key) const;
};

/// Splits sectioned text into sections. Throws ParseError with line/column.
std::vector<Section> read_sections(std::string_view text);

struct ParseOptions {
  bool validate = true;  ///< reject grids whose validation report is non-empty
};

/// Parses a grid file. Unit-suffixed keys (resistance_mohm, td0_t_ms, ...)
/// are normalized to SI fields; short-circuit time constants in a dynamics
/// block are converted to open-circuit constants.
GridModel parse_grid(std::string_view text, const ParseOptions& options = {});

/// Emits sections in a stable order with keys sorted and SI unit suffixes.
/// parse_grid(serialize_grid(g)) == g for every valid g.
std::string serialize_grid(const GridModel& grid);

/// Applies the entries of a section to the element carrying `section.id`
/// (any element kind). Used by study files to modify a loaded grid.
void apply_modification(GridModel& grid, const Section& section);

/// Loads `builtin:<fixture>` or a grid file path.
GridModel load_grid(const std::string& source);

}  // namespace vessel::grid
