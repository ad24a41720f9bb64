#include "vessel/grid/fixtures.hpp"

#include <cmath>
#include <string>

#include "vessel/error.hpp"

namespace vessel::grid {
namespace {

Bus ac_bus(std::string id, double v, double f) { return {std::move(id), BusKind::AC, v, f}; }
Bus dc_bus(std::string id, double v) { return {std::move(id), BusKind::DC, v, 0.0}; }

BranchSpec cable(std::string id, std::string from, std::string to, double r_mohm, double x_mohm) {
  return {std::move(id), std::move(from), std::move(to), BranchKind::Cable, r_mohm / 1000.0, x_mohm / 1000.0, 0.0, true};
}

// Impedance in percent on the transformer rating, referred to the from side.
BranchSpec transformer(std::string id, std::string from, std::string to, double v_from, double kva, double r_pct,
                       double x_pct) {
  double zbase = v_from * v_from / (kva * 1000.0);
  return {std::move(id), std::move(from), std::move(to), BranchKind::Transformer, r_pct / 100.0 * zbase,
          x_pct / 100.0 * zbase, kva, true};
}

GeneratorSpec generator(std::string id, std::string bus, double kva, double kw, double v, double amps, double f,
                        double rpm, int poles, double r_mohm) {
  GeneratorSpec g;
  g.id = std::move(id);
  g.bus = std::move(bus);
  g.rated_kva = kva;
  g.rated_kw = kw;
  g.voltage = v;
  g.rated_current = amps;
  g.frequency = f;
  g.power_factor = 0.80;
  g.speed_rpm = rpm;
  g.poles = poles;
  g.winding_resistance = r_mohm / 1000.0;
  return g;
}

// Synthetic machine data: the vessels' datasheet reactances and time
// constants are not public.
GeneratorDynamicParams synthetic_dynamics(double xd, double xd_t, double xd_st, double td0_t, double td0_st,
                                          double h) {
  GeneratorDynamicParams d;
  d.xd = xd;
  d.xd_t = xd_t;
  d.xd_st = xd_st;
  d.td0_t = td0_t;
  d.td0_st = td0_st;
  d.inertia_h = h;
  d.damping = 2.0;
  d.governor_droop = 0.05;
  d.governor_t = 0.5;
  d.avr_gain = 5.0;
  d.avr_t = 0.5;
  d.synthetic = true;
  return d;
}

TccCurve tcc(double in_a, double st_multiple, double st_delay) {
  TccCurve c;
  c.long_time = {1.2 * in_a, LongTimeKind::Definite, 20.0};
  c.short_time = {st_multiple * in_a, st_delay, false};
  c.zsi_extended_delay = 0.1;
  return c;
}

BreakerSpec breaker(std::string id, std::string from, std::string to, TccCurve curve,
                    SwitchState state = SwitchState::Closed) {
  return {std::move(id), std::move(from), std::move(to), false, curve, state};
}

ConverterSpec converter(std::string id, ConverterKind kind, std::string ac, std::string dc, double amps, double kw) {
  ConverterSpec c;
  c.id = std::move(id);
  c.kind = kind;
  c.ac_bus = std::move(ac);
  c.dc_bus = std::move(dc);
  c.rated_current = amps;
  c.rated_kw = kw;
  return c;
}

LoadSpec load(std::string id, std::string bus, double kva, double pf, double static_frac, double demand,
              std::string conv = {}, std::optional<double> xr = std::nullopt) {
  LoadSpec l;
  l.id = std::move(id);
  l.bus = std::move(bus);
  l.rated_kva = kva;
  l.power_factor = pf;
  l.static_fraction = static_frac;
  l.motor_fraction = std::round((1.0 - static_frac) * 1e6) / 1e6;
  l.xr_ratio = xr;
  l.demand_factor = demand;
  l.converter = std::move(conv);
  return l;
}

double drive_current(double kw, double v, double pf) { return std::ceil(kw * 1000.0 / (kSqrt3 * v * pf)); }

GridModel ac_vessel() {
  GridModel g;
  g.name = "ac_vessel";
  constexpr double V = 690.0;
  constexpr double F = 60.0;
  constexpr double st_delay = 0.216;

  for (const char* b : {"PS", "MID", "SB"}) g.buses.push_back(ac_bus(b, V, F));

  struct Machine {
    const char* id;
    const char* section;
    double kva, kw, amps, rpm, r_mohm, h;
    int poles;
  };
  const Machine machines[] = {
      {"DG#01", "PS", 2395, 1916, 2004, 720, 1.02, 1.1, 10},
      {"DG#02", "PS", 3213, 2570, 2688, 720, 0.70, 1.3, 10},
      {"DG#03", "SB", 3213, 2570, 2688, 720, 0.70, 1.3, 10},
      {"DG#04", "SB", 2395, 1916, 2004, 720, 1.02, 1.1, 10},
      {"DG#05", "MID", 1713, 1370, 1433, 1800, 1.46, 0.9, 4},
  };
  for (const auto& m : machines) {
    std::string tag = std::string(m.id).replace(2, 1, "");  // DG#01 -> DG01
    std::string term = tag + "_T";
    std::string feeder = tag + "_S";
    g.buses.push_back(ac_bus(term, V, F));
    g.buses.push_back(ac_bus(feeder, V, F));
    g.branches.push_back(cable("C_" + tag, term, feeder, 0.5, 1.0));
    auto gen = generator(m.id, term, m.kva, m.kw, V, m.amps, F, m.rpm, m.poles, m.r_mohm);
    gen.dynamics = synthetic_dynamics(2.2, 0.22, 0.14, 3.0, 0.03, m.h);
    g.generators.push_back(gen);
    g.breakers.push_back(breaker("CB_" + tag, m.section, feeder, tcc(m.amps, 3.0, st_delay)));
  }
  g.breakers.push_back(breaker("CB_PS_MID", "PS", "MID", tcc(2688, 3.0, st_delay)));
  g.breakers.push_back(breaker("CB_MID_SB", "MID", "SB", tcc(2688, 3.0, st_delay)));

  // 440 V distribution behind 690/440 V transformers.
  for (const char* side : {"PS", "SB"}) {
    std::string lv = std::string("LV_") + side;
    g.buses.push_back(ac_bus(lv, 440.0, F));
    g.branches.push_back(transformer(std::string("TR_") + side, side, lv, V, 1000.0, 1.0, 6.0));
    g.loads.push_back(load(std::string("LL_") + side, lv, 500.0, 0.90, 0.65, 0.6, {}, 6.0));
  }

  // Battery-inverter pairs, 1500 kWh / 1500 kW. DC-side voltage and battery
  // short-circuit data are synthetic.
  for (const char* side : {"PS", "SB"}) {
    std::string dc = std::string("BAT_") + side + "_DC";
    g.buses.push_back(dc_bus(dc, 1000.0));
    BatterySource bat;
    bat.id = std::string("BAT_") + side;
    bat.bus = dc;
    bat.capacity_kwh = 1500.0;
    bat.sc_peak_current = 20000.0;
    bat.sc_time_constant = 0.5e-3;
    bat.min_soc = 0.25;
    g.batteries.push_back(bat);
    g.converters.push_back(
        converter(std::string("INV_BAT_") + side, ConverterKind::Inverter, side, dc, drive_current(1500, V, 1.0), 1500.0));
  }

  // Thrusters behind their drives (pf 0.85); the drive feeds 150 % of rating into faults.
  struct Thruster {
    const char* id;
    const char* bus;
    double kw;
    double demand;
  };
  const Thruster thrusters[] = {
      {"BT1", "PS", 1000, 0.3}, {"BT2", "MID", 1000, 0.3}, {"BT3", "SB", 1000, 0.3},
      {"PT_PS", "PS", 2100, 0.3}, {"PT_SB", "SB", 2100, 0.3},
  };
  for (const auto& t : thrusters) {
    std::string vfd = std::string("VFD_") + t.id;
    g.converters.push_back(converter(vfd, ConverterKind::Inverter, t.bus, {}, drive_current(t.kw, V, 0.85), t.kw));
    g.loads.push_back(load(t.id, t.bus, t.kw / 0.85, 0.85, 1.0, t.demand, vfd));
  }

  // Cranes: one lumped load of 746.7 kVA, 20 % static / 80 % motor.
  g.loads.push_back(load("CRANES", "MID", 746.7, 0.75, 0.20, 0.5, {}, 8.0));
  return g;
}

GridModel dc_vessel() {
  GridModel g;
  g.name = "dc_vessel";
  constexpr double VDC = 650.0;  // not published; reproduces the DC-link peak
  constexpr double VAC = 400.0;
  constexpr double F = 50.0;

  g.buses.push_back(dc_bus("DC_PS", VDC));
  g.buses.push_back(dc_bus("DC_SB", VDC));
  g.breakers.push_back(breaker("CB_DC_TIE", "DC_PS", "DC_SB", tcc(2000, 8.0, 0.05), SwitchState::Open));

  struct Gen {
    const char* id;
    const char* side;
  };
  for (const auto& x : {Gen{"G1", "DC_PS"}, Gen{"G2", "DC_SB"}, Gen{"G3", "DC_SB"}}) {
    std::string ac = std::string(x.id) + "_AC";
    g.buses.push_back(ac_bus(ac, VAC, F));
    auto gen = generator(x.id, ac, 582, 465.6, VAC, 840, F, 1500, 4, 3.4);
    gen.dynamics = synthetic_dynamics(2.5, 0.20, 0.12, 2.0, 0.02, 0.8);
    g.generators.push_back(gen);
    std::string ch = std::string("CH") + (x.id + 1);
    g.converters.push_back(converter(ch, ConverterKind::Charger, ac, x.side, 850.0, 850.0 * VDC / 1000.0));
    g.fuses.push_back({"F_" + ch, ch, 9350.0, std::nullopt});
  }

  // DC-link branch of the first charger; sizes are not known in general, so it ships disabled.
  CapacitorBranch cap;
  cap.id = "CAP";
  cap.capacitance = 2400e-6;
  cap.series_resistance = 54.7e-3;
  cap.series_inductance = 5.5e-6;
  cap.initial_voltage = VDC;
  cap.enabled = false;
  g.converters[0].dc_link = cap;

  for (const char* side : {"PS", "SB"}) {
    BatterySource bat;
    bat.id = std::string("BAT_") + side;
    bat.bus = std::string("DC_") + side;
    bat.capacity_kwh = 1000.0;  // synthetic
    bat.sc_peak_current = 14900.0;
    bat.sc_time_constant = 0.16e-3;
    bat.min_soc = 0.25;
    g.batteries.push_back(bat);
  }

  struct Drive {
    const char* id;
    const char* side;
    double kw;
    double amps;
    double demand;
  };
  const Drive drives[] = {
      {"PTI_PS", "DC_PS", 550, 1150, 0.4}, {"PTI_SB", "DC_SB", 550, 1150, 0.5},
      {"BT1", "DC_PS", 200, 460, 0.1},     {"BT2", "DC_PS", 200, 460, 0.1},
      {"ST1", "DC_SB", 200, 460, 0.1},
  };
  for (const auto& d : drives) {
    std::string ac = std::string(d.id) + "_AC";
    std::string inv = std::string("INV_") + d.id;
    g.buses.push_back(ac_bus(ac, VAC, F));
    g.converters.push_back(converter(inv, ConverterKind::Inverter, ac, d.side, d.amps, d.kw));
    g.loads.push_back(load(d.id, ac, d.kw / 0.85, 0.85, 1.0, d.demand, inv));
  }

  // 400 V distribution: grid inverter, 600 kVA transformer, 400 kVA lumped load.
  for (const char* side : {"PS", "SB"}) {
    std::string inv_ac = std::string("GINV_") + side + "_AC";
    std::string dist = std::string("DIST_") + side;
    g.buses.push_back(ac_bus(inv_ac, VAC, F));
    g.buses.push_back(ac_bus(dist, VAC, F));
    g.converters.push_back(converter(std::string("GINV_") + side, ConverterKind::GridInverter, inv_ac,
                                     std::string("DC_") + side, 2060.0, 2060.0 * kSqrt3 * VAC / 1000.0));
    g.branches.push_back(transformer(std::string("TR_") + side, inv_ac, dist, VAC, 600.0, 1.0, 5.0));
    g.loads.push_back(load(std::string("DL_") + side, dist, 400.0, 0.85, 0.65, 0.4, {}, 6.0));
  }
  return g;
}

}  // namespace

GridModel builtin_fixture(FixtureName name) {
  return name == FixtureName::AcVessel ? ac_vessel() : dc_vessel();
}

GridModel builtin_fixture(std::string_view name) {
  if (name == "ac_vessel") return ac_vessel();
  if (name == "dc_vessel") return dc_vessel();
  throw InputError("unknown fixture '" + std::string(name) + "' (expected ac_vessel or dc_vessel)");
}

std::vector<std::string_view> builtin_fixture_names() { return {"ac_vessel", "dc_vessel"}; }

}  // namespace vessel::grid
