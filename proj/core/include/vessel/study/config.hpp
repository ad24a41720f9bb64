#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vessel/grid/io.hpp"
#include "vessel/powerflow/ac.hpp"
#include "vessel/tdsim/cct.hpp"
#include "vessel/tdsim/controllers.hpp"
#include "vessel/tdsim/events.hpp"
#include "vessel/tdsim/simulate.hpp"

namespace vessel::study {

enum class StudyKind { Powerflow, ScAc, ScDc, Tdsim, Cct, Protect, I2t };
enum class Format { Csv, Text };

/// Accepts both `sc-ac` and `sc_ac` spellings.
StudyKind parse_study_kind(std::string_view text);
std::string_view to_string(StudyKind kind);

struct ProtectBlock {
  bool zsi = true;
  std::vector<std::string> failed;
  double cct_budget = 0.542;  ///< s
};

struct CctBlock {
  tdsim::CctFault fault;
  double t_lo = 0.0;
  double t_hi = 1.0;
  double tol = 1e-3;
  tdsim::CctOptions options;
};

struct I2tBlock {
  std::optional<std::string> trace;  ///< CSV with time in column 1 and current in column 2
  std::optional<double> fuse_i2t;    ///< A^2 s, with `trace`
};

struct StudyConfig {
  StudyKind kind = StudyKind::Powerflow;
  std::string grid;  ///< path, `builtin:<name>` or bare fixture name
  std::optional<std::string> study_path;
  std::string out_dir;
  Format format = Format::Csv;
  bool strict = false;
  bool enable_capacitors = false;

  std::vector<grid::Section> modifications;  ///< `[modify <id>]` blocks
  powerflow::PowerflowOptions powerflow;
  std::optional<std::string> fault_bus;
  tdsim::EventSchedule events;
  std::vector<tdsim::ControllerConfig> controllers;
  tdsim::SimConfig sim;
  std::optional<CctBlock> cct;
  ProtectBlock protect;
  I2tBlock i2t;
};

/// Reads `[powerflow]`, `[fault]`, `[event <id>]`, `[controller <id>]`,
/// `[sim]`, `[cct]`, `[protect]`, `[i2t]` and `[modify <id>]` blocks into `cfg`.
void apply_study_text(StudyConfig& cfg, std::string_view text);

/// Grid after loading and applying the study's modifications.
grid::GridModel resolve_grid(const StudyConfig& cfg);

/// Checks the blocks the study kind needs. Throws InputError.
void check_required(const StudyConfig& cfg);

}  // namespace vessel::study
