#include "vessel/grid/validate.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "vessel/grid/topology.hpp"

namespace vessel::grid {
namespace {

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

class Checker {
 public:
  explicit Checker(const GridModel& g) : g_(g) {}

  ValidationReport run() {
    if (g_.buses.empty()) add("grid", "empty grid", "no buses declared");
    if (!(g_.base_mva > 0.0)) add("grid", "positive base", "base power must be > 0");
    ids();
    for (const auto& b : g_.buses) bus(b);
    for (const auto& b : g_.branches) branch(b);
    for (const auto& x : g_.generators) generator(x);
    for (const auto& x : g_.batteries) battery(x);
    for (const auto& x : g_.converters) converter(x);
    for (const auto& x : g_.loads) load(x);
    for (const auto& x : g_.breakers) breaker(x);
    for (const auto& x : g_.fuses) fuse(x);
    connectivity();
    return std::move(report_);
  }

 private:
  void add(const std::string& el, const std::string& rule, const std::string& detail) {
    report_.violations.push_back({el, rule, detail});
  }
  void positive(const std::string& el, const char* what, double v) {
    if (!(v > 0.0)) add(el, std::string(what) + " positive", std::string(what) + " must be > 0");
  }
  // Checks the bus reference and returns it, or nullptr.
  const Bus* ref(const std::string& el, const std::string& bus, std::optional<BusKind> kind) {
    const Bus* b = g_.find_bus(bus);
    if (!b) {
      add(el, "dangling reference", "bus '" + bus + "' is not declared");
      return nullptr;
    }
    if (kind && b->kind != *kind) {
      add(el, "bus kind", "bus '" + bus + "' must be " + std::string(to_string(*kind)));
    }
    return b;
  }

  void ids() {
    std::set<std::string> seen;
    auto check = [&](const std::string& id) {
      if (id.empty()) add("grid", "missing id", "element without id");
      else if (!seen.insert(id).second) add(id, "duplicate id", "id used by more than one element");
    };
    for (const auto& x : g_.buses) check(x.id);
    for (const auto& x : g_.branches) check(x.id);
    for (const auto& x : g_.generators) check(x.id);
    for (const auto& x : g_.batteries) check(x.id);
    for (const auto& x : g_.converters) {
      check(x.id);
      if (x.dc_link) check(x.dc_link->id);
    }
    for (const auto& x : g_.loads) check(x.id);
    for (const auto& x : g_.breakers) check(x.id);
    for (const auto& x : g_.fuses) check(x.id);
  }

  void bus(const Bus& b) {
    positive(b.id, "nominal voltage", b.nominal_voltage);
    if (b.kind == BusKind::AC && b.frequency != 50.0 && b.frequency != 60.0) {
      add(b.id, "frequency", "AC bus frequency must be 50 or 60 Hz");
    }
  }

  void branch(const BranchSpec& b) {
    const Bus* f = ref(b.id, b.from, std::nullopt);
    const Bus* t = ref(b.id, b.to, std::nullopt);
    if (f && t && f->kind != t->kind) add(b.id, "bus kind", "branch joins AC and DC buses");
    if (b.from == b.to) add(b.id, "self loop", "branch ends on one bus");
    if (b.resistance < 0.0 || b.reactance < 0.0) add(b.id, "impedance sign", "R and X must be >= 0");
    if (b.resistance == 0.0 && b.reactance == 0.0) add(b.id, "zero impedance", "use a breaker for a zero-impedance tie");
    if (b.kind == BranchKind::Cable && f && t && f->nominal_voltage != t->nominal_voltage) {
      add(b.id, "cable voltage", "cable joins buses of different nominal voltage");
    }
  }

  void generator(const GeneratorSpec& x) {
    const Bus* b = ref(x.id, x.bus, BusKind::AC);
    positive(x.id, "rated_kva", x.rated_kva);
    positive(x.id, "rated_kw", x.rated_kw);
    positive(x.id, "voltage", x.voltage);
    positive(x.id, "rated_current", x.rated_current);
    positive(x.id, "frequency", x.frequency);
    if (!(x.power_factor > 0.0 && x.power_factor <= 1.0)) add(x.id, "power factor range", "pf must lie in (0, 1]");
    if (x.speed_rpm < 0.0) add(x.id, "speed", "speed must be >= 0");
    if (x.poles && *x.poles <= 0) add(x.id, "poles", "pole count must be > 0");
    if (x.winding_resistance < 0.0) add(x.id, "winding resistance", "must be >= 0");
    if (x.rated_kva > 0 && x.power_factor > 0 && !rel_close(x.rated_kw, x.rated_kva * x.power_factor, 0.01)) {
      std::ostringstream d;
      d << x.rated_kva << " kVA x " << x.power_factor << " = " << x.rated_kva * x.power_factor << " != " << x.rated_kw
        << " kW";
      add(x.id, "kw/kva/pf mismatch", d.str());
    }
    if (x.voltage > 0 && x.rated_current > 0 &&
        !rel_close(x.rated_kva * 1000.0 / (kSqrt3 * x.voltage), x.rated_current, 0.01)) {
      add(x.id, "rated current mismatch", "rated_current differs from kVA/(sqrt3 V) by more than 1 %");
    }
    if (b && b->frequency > 0 && x.frequency != b->frequency) add(x.id, "frequency", "differs from bus frequency");
    if (x.p_setpoint_kw && *x.p_setpoint_kw < 0.0) add(x.id, "setpoint", "p_setpoint must be >= 0");
    if (!(x.v_setpoint_pu > 0.0)) add(x.id, "setpoint", "v_setpoint must be > 0");
    if (x.dynamics) dynamics(x.id, *x.dynamics);
  }

  void dynamics(const std::string& id, const GeneratorDynamicParams& d) {
    if (!(0.0 < d.xd_st && d.xd_st < d.xd_t && d.xd_t < d.xd)) {
      add(id, "reactance ordering", "need 0 < X''d < X'd < Xd");
    }
    positive(id, "td0_t", d.td0_t);
    positive(id, "td0_st", d.td0_st);
    if (d.tdc && !(*d.tdc > 0.0)) add(id, "tdc positive", "tdc must be > 0");
    if (d.ikd && !(*d.ikd > 0.0)) add(id, "ikd positive", "ikd must be > 0");
    if (d.inertia_h < 0.0 || d.damping < 0.0) add(id, "dynamics sign", "inertia and damping must be >= 0");
    if (d.governor_droop < 0.0 || d.governor_t < 0.0 || d.avr_gain < 0.0 || d.avr_t < 0.0) {
      add(id, "control sign", "governor/AVR parameters must be >= 0");
    }
    if (d.governor_droop > 0.0 && !(d.governor_t > 0.0)) add(id, "governor", "governor time constant must be > 0");
    if (d.avr_gain > 0.0 && !(d.avr_t > 0.0)) add(id, "avr", "AVR time constant must be > 0");
  }

  void battery(const BatterySource& x) {
    ref(x.id, x.bus, BusKind::DC);
    positive(x.id, "sc_peak_current", x.sc_peak_current);
    positive(x.id, "sc_time_constant", x.sc_time_constant);
    if (x.capacity_kwh < 0.0) add(x.id, "capacity", "capacity must be >= 0");
    if (!(x.min_soc >= 0.0 && x.min_soc < 1.0)) add(x.id, "min_soc range", "min_soc must lie in [0, 1)");
    if (!(x.soc >= 0.0 && x.soc <= 1.0)) add(x.id, "soc range", "soc must lie in [0, 1]");
  }

  void converter(const ConverterSpec& x) {
    positive(x.id, "rated_current", x.rated_current);
    if (x.rated_kw < 0.0) add(x.id, "rated_kw", "rated_kw must be >= 0");
    if (!(x.sc_contribution_factor >= 1.0)) add(x.id, "sc factor", "sc_contribution_factor must be >= 1");
    if (!(x.efficiency > 0.0 && x.efficiency <= 1.0)) add(x.id, "efficiency range", "efficiency must lie in (0, 1]");
    if (x.ac_bus.empty() && x.dc_bus.empty()) add(x.id, "dangling reference", "converter names no bus");
    if (!x.ac_bus.empty()) ref(x.id, x.ac_bus, BusKind::AC);
    if (!x.dc_bus.empty()) ref(x.id, x.dc_bus, BusKind::DC);
    if (x.kind == ConverterKind::Charger && (x.ac_bus.empty() || x.dc_bus.empty())) {
      add(x.id, "charger buses", "a charger needs both ac_bus and dc_bus");
    }
    if (x.kind == ConverterKind::GridInverter && (x.ac_bus.empty() || x.dc_bus.empty())) {
      add(x.id, "grid inverter buses", "a grid inverter needs both ac_bus and dc_bus");
    }
    if (x.dc_link) {
      const auto& c = *x.dc_link;
      positive(c.id, "capacitance", c.capacitance);
      positive(c.id, "series_resistance", c.series_resistance);
      positive(c.id, "series_inductance", c.series_inductance);
      positive(c.id, "initial_voltage", c.initial_voltage);
    }
  }

  void load(const LoadSpec& x) {
    ref(x.id, x.bus, std::nullopt);
    if (x.rated_kva < 0.0) add(x.id, "rated_kva", "rated_kva must be >= 0");
    if (!(x.power_factor > 0.0 && x.power_factor <= 1.0)) add(x.id, "power factor range", "pf must lie in (0, 1]");
    if (x.static_fraction < 0.0 || x.motor_fraction < 0.0 || std::abs(x.static_fraction + x.motor_fraction - 1.0) > 1e-9) {
      add(x.id, "fractions sum", "static_fraction + motor_fraction must equal 1");
    }
    positive(x.id, "locked_rotor_multiplier", x.locked_rotor_multiplier);
    positive(x.id, "motor_t_ac", x.motor_t_ac);
    if (x.xr_ratio && !(*x.xr_ratio > 0.0)) add(x.id, "xr_ratio", "xr_ratio must be > 0");
    if (x.demand_factor < 0.0) add(x.id, "demand factor", "demand_factor must be >= 0");
    if (!x.converter.empty() && !g_.find_converter(x.converter)) {
      add(x.id, "dangling reference", "converter '" + x.converter + "' is not declared");
    }
  }

  void breaker(const BreakerSpec& x) {
    const Bus* f = ref(x.id, x.from, std::nullopt);
    const Bus* t = ref(x.id, x.to, std::nullopt);
    if (f && t && f->kind != t->kind) add(x.id, "bus kind", "breaker joins AC and DC buses");
    if (f && t && f->nominal_voltage != t->nominal_voltage) add(x.id, "breaker voltage", "buses differ in voltage");
    if (x.from == x.to) add(x.id, "self loop", "breaker ends on one bus");
    const auto& c = x.tcc;
    positive(x.id, "lt pickup", c.long_time.pickup);
    positive(x.id, "lt delay", c.long_time.delay);
    positive(x.id, "st delay", c.short_time.delay);
    if (!(c.short_time.pickup > c.long_time.pickup)) add(x.id, "tcc pickup order", "short-time pickup must exceed long-time");
    positive(x.id, "zsi delay", c.zsi_extended_delay);
  }

  void fuse(const FuseSpec& x) {
    positive(x.id, "i2t", x.i2t_total_clearing);
    if (x.rated_current && !(*x.rated_current > 0.0)) add(x.id, "rated_current", "rated_current must be > 0");
    if (!g_.has_element(x.element)) add(x.id, "dangling reference", "element '" + x.element + "' is not declared");
  }

  // A bus with nothing attached and no switching path to anything is a modeling error.
  void connectivity() {
    if (g_.buses.empty()) return;
    std::set<std::string> used;
    for (const auto& b : g_.branches) used.insert({b.from, b.to});
    for (const auto& b : g_.breakers) used.insert({b.from, b.to});
    for (const auto& x : g_.generators) used.insert(x.bus);
    for (const auto& x : g_.batteries) used.insert(x.bus);
    for (const auto& x : g_.loads) used.insert(x.bus);
    for (const auto& x : g_.converters) used.insert({x.ac_bus, x.dc_bus});
    for (const auto& b : g_.buses) {
      if (!used.count(b.id)) add(b.id, "isolated bus", "no element connects to this bus");
    }
  }

  const GridModel& g_;
  ValidationReport report_;
};

}  // namespace

bool ValidationReport::has(const std::string& element, const std::string& rule) const {
  for (const auto& v : violations) {
    if (v.element == element && v.rule == rule) return true;
  }
  return false;
}

std::string ValidationReport::to_string() const {
  std::string out;
  for (const auto& v : violations) out += "  " + v.element + ": " + v.rule + " (" + v.detail + ")\n";
  return out;
}

ValidationReport validate(const GridModel& grid) { return Checker(grid).run(); }

}  // namespace vessel::grid
