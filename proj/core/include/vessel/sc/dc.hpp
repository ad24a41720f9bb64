#pragma once

#include <span>
#include <string>
#include <vector>

#include "vessel/grid/model.hpp"

namespace vessel::sc {

enum class DcRegime { Underdamped, Critical, Overdamped, ExponentialRise, Constant };

std::string_view to_string(DcRegime r);

struct DcScTrace {
  std::string contributor;
  std::vector<double> t;  ///< s
  std::vector<double> i;  ///< A
  double peak_current = 0.0;
  double time_to_peak = 0.0;
  double sustained = 0.0;  ///< A, asymptotic value
  DcRegime regime = DcRegime::Constant;
};

/// Exact series-RLC discharge of a charged capacitor into a bolted fault.
DcScTrace capacitor_sc_trace(const grid::CapacitorBranch& cap, std::span<const double> tgrid);

/// Closed-form instantaneous capacitor current at time t.
double capacitor_current(const grid::CapacitorBranch& cap, double t);

/// Li-ion battery short circuit: Ip * (1 - exp(-t / tau)).
DcScTrace battery_sc_trace(const grid::BatterySource& bat, std::span<const double> tgrid);

/// Chargers feed sc_contribution_factor * rated current; inverters feed nothing.
DcScTrace converter_sc_contribution(const grid::ConverterSpec& conv, std::span<const double> tgrid);

struct DcFaultSummary {
  std::string bus;
  DcScTrace total;
  std::vector<DcScTrace> contributors;
  std::vector<std::string> warnings;
};

DcFaultSummary dc_fault_summary(const grid::GridModel& grid, const std::string& bus, std::span<const double> tgrid);

}  // namespace vessel::sc
