#pragma once

#include <span>
#include <string>
#include <vector>

#include "vessel/grid/model.hpp"
#include "vessel/powerflow/ac.hpp"
#include "vessel/powerflow/operating_point.hpp"

namespace vessel::sc {

struct OpenCircuitConstants {
  double td0_t;
  double td0_st;
};

struct ShortCircuitConstants {
  double td_t;
  double td_st;
};

/// Short-circuit -> open-circuit machine time constants:
/// T'd0 = T'd * Xd / X'd and T''d0 = T''d * X'd / X''d.
OpenCircuitConstants convert_time_constants(double xd, double xd_t, double xd_st, double td_t, double td_st);

/// Open-circuit -> short-circuit (inverse mapping).
ShortCircuitConstants to_short_circuit_constants(double xd, double xd_t, double xd_st, double td0_t, double td0_st);

enum class ValueSource { Datasheet, Estimated };

struct AcScTrace {
  std::string contributor;
  std::string bus;
  std::vector<double> t;         ///< s
  std::vector<double> iac;       ///< A rms, AC component
  std::vector<double> idc;       ///< A, DC component
  std::vector<double> envelope;  ///< A, sqrt(2) * iac + idc
  double i_kd_st = 0.0;  ///< I''kd
  double i_kd_t = 0.0;   ///< I'kd
  double i_kd = 0.0;     ///< Ikd
  double e_q0_st = 0.0;  ///< V phase
  double e_q0_t = 0.0;
  ValueSource ikd_source = ValueSource::Datasheet;
  ValueSource tdc_source = ValueSource::Datasheet;
};

/// Ohmic machine model at the terminals, short-circuit time constants.
struct MachineScModel {
  double x_st_ohm = 0.0;
  double x_t_ohm = 0.0;
  double xd_ohm = 0.0;  ///< only needed when ikd is absent
  double td_st = 0.0;   ///< T''d, s
  double td_t = 0.0;    ///< T'd, s
  double tdc = 0.0;     ///< s
  std::optional<double> ikd;
};

/// Decrement-curve evaluation of a synchronous machine (IEC 61363 method).
AcScTrace machine_sc_trace(const MachineScModel& model, const powerflow::OperatingPoint& op,
                           std::span<const double> tgrid);

/// Builds the ohmic model from a generator spec (per-unit on machine base,
/// open-circuit constants) and evaluates it.
AcScTrace machine_sc_trace(const grid::GeneratorSpec& gen, const powerflow::OperatingPoint& op,
                           std::span<const double> tgrid);

MachineScModel machine_model(const grid::GeneratorSpec& gen);

/// Motor share of a lumped load: single-exponential AC and DC decay.
AcScTrace motor_group_sc_trace(const grid::LoadSpec& load, double bus_voltage, std::span<const double> tgrid,
                               double frequency);

/// Motor-rated current of a lumped load's motor part, A.
double motor_rated_current(const grid::LoadSpec& load, double bus_voltage);

/// Drive/inverter contribution: constant sc_contribution_factor * rated current.
AcScTrace vfd_contribution(const grid::ConverterSpec& conv, std::span<const double> tgrid);

/// sqrt(2) * iac + idc.
double compose_peak(double iac, double idc);

struct FaultSummary {
  std::string bus;
  double frequency = 0.0;
  double period = 0.0;  ///< T, s
  std::vector<AcScTrace> contributors;
  std::vector<double> t;
  std::vector<double> iac_total;
  std::vector<double> idc_total;
  double iac_half_cycle = 0.0;
  double idc_half_cycle = 0.0;
  double ip = 0.0;

  /// Per-contributor values at T/2, referred to the fault bus voltage.
  struct HalfCycle {
    std::string contributor;
    double iac;
    double idc;
    double ip;
  };
  std::vector<HalfCycle> half_cycle;
};

/// Sums contributor traces reachable from `bus` through closed breakers and
/// branches. Contributor currents are referred to the fault bus voltage.
FaultSummary fault_summary(const grid::GridModel& grid, const std::string& bus,
                           const powerflow::PowerflowSolution& sol, std::span<const double> tgrid);

}  // namespace vessel::sc
