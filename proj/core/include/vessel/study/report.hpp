#pragma once

#include <string>
#include <vector>

#include "vessel/study/config.hpp"

namespace vessel::study {

struct Table {
  std::string name;  ///< file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Everything a study produces: tables plus `key = value` summary lines.
struct Report {
  std::vector<Table> tables;
  std::vector<std::pair<std::string, std::string>> summary;
  bool negative = false;  ///< study-level failure, exit 4 under --strict

  Table& table(std::string name, std::vector<std::string> header);
  void add(std::string key, std::string value);
  void add(std::string key, double value);
};

/// Shortest round-trip number text.
std::string num(double v);

std::string render_csv(const Table& t);
std::string render_text(const Table& t);
std::string render_summary(const Report& r);

/// Writes `<name>.csv` per table (or one `report.txt` for text) and
/// `summary.txt`. Every file goes to a temporary name first and is renamed
/// once all are written. Throws InputError when the directory is unusable.
void emit_report(const Report& report, const std::string& out_dir, Format format);

}  // namespace vessel::study
