#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vessel::grid {

inline constexpr double kSqrt3 = 1.7320508075688772;
inline constexpr double kPi = 3.14159265358979323846;

enum class BusKind { AC, DC };

struct Bus {
  std::string id;
  BusKind kind = BusKind::AC;
  double nominal_voltage = 0.0;  ///< V, line-to-line (AC) or pole-to-pole (DC)
  double frequency = 0.0;        ///< Hz, AC only

  bool operator==(const Bus&) const = default;
};

enum class BranchKind { Cable, Transformer };

/// Series impedance between two buses; ohms are referred to the `from` bus voltage.
struct BranchSpec {
  std::string id;
  std::string from;
  std::string to;
  BranchKind kind = BranchKind::Cable;
  double resistance = 0.0;  ///< ohm
  double reactance = 0.0;   ///< ohm
  double rated_kva = 0.0;   ///< optional, 0 = unrated
  bool synthetic = false;

  bool operator==(const BranchSpec&) const = default;
};

/// Synchronous machine data for the short-circuit and time-domain engines.
///
/// Reactances are per-unit on the machine rating. Time constants are the
/// open-circuit values; short-circuit values given in a grid file are
/// converted on load.
struct GeneratorDynamicParams {
  double xd = 0.0;
  double xd_t = 0.0;
  double xd_st = 0.0;
  double td0_t = 0.0;  ///< s
  double td0_st = 0.0; ///< s
  std::optional<double> tdc;  ///< s, armature DC constant; estimated from Ra when absent
  std::optional<double> ikd;  ///< A, steady-state short-circuit current (datasheet)
  double inertia_h = 0.0;     ///< s
  double damping = 0.0;       ///< pu
  double governor_droop = 0.0;  ///< pu, 0 disables the governor
  double governor_t = 0.0;      ///< s
  double avr_gain = 0.0;        ///< pu/pu, 0 disables the AVR
  double avr_t = 0.0;           ///< s
  bool synthetic = false;

  bool operator==(const GeneratorDynamicParams&) const = default;
};

struct GeneratorSpec {
  std::string id;
  std::string bus;
  double rated_kva = 0.0;
  double rated_kw = 0.0;
  double voltage = 0.0;        ///< V
  double rated_current = 0.0;  ///< A
  double frequency = 0.0;      ///< Hz
  double power_factor = 0.0;
  double speed_rpm = 0.0;
  std::optional<int> poles;
  double winding_resistance = 0.0;  ///< ohm per phase
  std::optional<GeneratorDynamicParams> dynamics;
  bool online = true;
  bool infinite = false;                  ///< ideal voltage source (infinite bus)
  std::optional<double> p_setpoint_kw;    ///< dispatch for non-slack operation
  double v_setpoint_pu = 1.0;

  bool operator==(const GeneratorSpec&) const = default;
};

struct BatterySource {
  std::string id;
  std::string bus;
  double capacity_kwh = 0.0;
  double sc_peak_current = 0.0;   ///< A
  double sc_time_constant = 0.0;  ///< s (L/R)
  double min_soc = 0.0;
  double soc = 1.0;

  bool operator==(const BatterySource&) const = default;
};

struct CapacitorBranch {
  std::string id;
  double capacitance = 0.0;        ///< F
  double series_resistance = 0.0;  ///< ohm
  double series_inductance = 0.0;  ///< H
  double initial_voltage = 0.0;    ///< V
  bool enabled = true;

  bool operator==(const CapacitorBranch&) const = default;
};

enum class ConverterKind { Inverter, Charger, DcDc, GridInverter };

struct ConverterSpec {
  std::string id;
  ConverterKind kind = ConverterKind::Inverter;
  std::string ac_bus;  ///< empty for DC/DC
  std::string dc_bus;  ///< empty for a drive with an internal DC link
  double rated_current = 0.0;  ///< A, AC side for inverters, DC side for chargers
  double rated_kw = 0.0;
  double sc_contribution_factor = 1.5;
  double efficiency = 0.97;
  double p_setpoint_kw = 0.0;   ///< AC-side injection when not grid forming
  double q_setpoint_kvar = 0.0;
  std::optional<CapacitorBranch> dc_link;

  bool operator==(const ConverterSpec&) const = default;
};

struct LoadSpec {
  std::string id;
  std::string bus;
  double rated_kva = 0.0;
  double power_factor = 1.0;
  double static_fraction = 1.0;
  double motor_fraction = 0.0;
  double locked_rotor_multiplier = 6.25;
  std::optional<double> xr_ratio;
  double motor_t_ac = 0.02;  ///< s, motor AC decrement constant
  double demand_factor = 1.0;
  std::string converter;  ///< feeding drive/inverter, empty when direct-on-line

  double p_kw() const;
  double q_kvar() const;

  bool operator==(const LoadSpec&) const = default;
};

enum class LongTimeKind { Definite, Inverse };

struct TccCurve {
  struct LongTime {
    double pickup = 0.0;  ///< A
    LongTimeKind kind = LongTimeKind::Definite;
    double delay = 0.0;  ///< s: definite delay, or time dial for inverse

    bool operator==(const LongTime&) const = default;
  };
  struct ShortTime {
    double pickup = 0.0;  ///< A
    double delay = 0.0;   ///< s
    bool directional = false;

    bool operator==(const ShortTime&) const = default;
  };

  LongTime long_time;
  ShortTime short_time;
  double zsi_extended_delay = 0.1;  ///< s

  bool operator==(const TccCurve&) const = default;
};

enum class SwitchState { Open, Closed };

/// Breaker between two buses. Forward direction is from `from` towards `to`.
struct BreakerSpec {
  std::string id;
  std::string from;
  std::string to;
  bool directional = false;
  TccCurve tcc;
  SwitchState state = SwitchState::Closed;

  bool closed() const { return state == SwitchState::Closed; }

  bool operator==(const BreakerSpec&) const = default;
};

struct FuseSpec {
  std::string id;
  std::string element;
  double i2t_total_clearing = 0.0;  ///< A^2 s
  std::optional<double> rated_current;

  bool operator==(const FuseSpec&) const = default;
};

struct GridModel {
  std::string name;
  double base_mva = 1.0;
  std::vector<Bus> buses;
  std::vector<BranchSpec> branches;
  std::vector<GeneratorSpec> generators;
  std::vector<BatterySource> batteries;
  std::vector<ConverterSpec> converters;
  std::vector<LoadSpec> loads;
  std::vector<BreakerSpec> breakers;
  std::vector<FuseSpec> fuses;

  const Bus* find_bus(std::string_view id) const;
  const BranchSpec* find_branch(std::string_view id) const;
  const GeneratorSpec* find_generator(std::string_view id) const;
  const BatterySource* find_battery(std::string_view id) const;
  const ConverterSpec* find_converter(std::string_view id) const;
  const LoadSpec* find_load(std::string_view id) const;
  const BreakerSpec* find_breaker(std::string_view id) const;
  const FuseSpec* find_fuse(std::string_view id) const;

  GeneratorSpec* find_generator(std::string_view id);
  LoadSpec* find_load(std::string_view id);
  BreakerSpec* find_breaker(std::string_view id);
  ConverterSpec* find_converter(std::string_view id);

  /// Bus lookup that throws InputError on a dangling id.
  const Bus& bus(std::string_view id) const;

  /// True when any element (bus, branch, source, load, device) carries this id.
  bool has_element(std::string_view id) const;

  bool operator==(const GridModel&) const = default;
};

std::string_view to_string(BusKind k);
std::string_view to_string(BranchKind k);
std::string_view to_string(ConverterKind k);
std::string_view to_string(LongTimeKind k);
std::string_view to_string(SwitchState s);

}  // namespace vessel::grid
