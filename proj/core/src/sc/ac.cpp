#include "vessel/sc/ac.hpp"

#include <cmath>

#include "vessel/error.hpp"
#include "vessel/grid/topology.hpp"

namespace vessel::sc {
namespace {

constexpr double kSqrt2 = 1.4142135623730951;

void check_ordering(double xd, double xd_t, double xd_st) {
  if (!(0.0 < xd_st && xd_st < xd_t && xd_t < xd)) {
    throw InputError("reactance ordering violated: need 0 < X''d < X'd < Xd");
  }
}

AcScTrace constant_trace(std::string id, std::string bus, double level, std::span<const double> tgrid) {
  AcScTrace tr;
  tr.contributor = std::move(id);
  tr.bus = std::move(bus);
  tr.t.assign(tgrid.begin(), tgrid.end());
  tr.iac.assign(tgrid.size(), level);
  tr.idc.assign(tgrid.size(), 0.0);
  tr.envelope.assign(tgrid.size(), kSqrt2 * level);
  tr.i_kd_st = tr.i_kd_t = tr.i_kd = level;
  return tr;
}

void scale_trace(AcScTrace& tr, double k) {
  for (auto* v : {&tr.iac, &tr.idc, &tr.envelope}) {
    for (double& x : *v) x *= k;
  }
  tr.i_kd_st *= k;
  tr.i_kd_t *= k;
  tr.i_kd *= k;
}

}  // namespace

OpenCircuitConstants convert_time_constants(double xd, double xd_t, double xd_st, double td_t, double td_st) {
  check_ordering(xd, xd_t, xd_st);
  if (!(td_t > 0.0 && td_st > 0.0)) throw InputError("time constants must be > 0");
  return {td_t * xd / xd_t, td_st * xd_t / xd_st};
}

ShortCircuitConstants to_short_circuit_constants(double xd, double xd_t, double xd_st, double td0_t, double td0_st) {
  check_ordering(xd, xd_t, xd_st);
  if (!(td0_t > 0.0 && td0_st > 0.0)) throw InputError("time constants must be > 0");
  return {td0_t * xd_t / xd, td0_st * xd_st / xd_t};
}

double compose_peak(double iac, double idc) { return kSqrt2 * iac + idc; }

AcScTrace machine_sc_trace(const MachineScModel& m, const powerflow::OperatingPoint& op,
                           std::span<const double> tgrid) {
  if (!(m.x_st_ohm > 0.0 && m.x_t_ohm > 0.0)) throw InputError("machine reactances must be > 0");
  if (!(m.td_st > 0.0 && m.td_t > 0.0 && m.tdc > 0.0)) throw InputError("non-positive machine time constant");
  const double u_ph = op.u0 / grid::kSqrt3;
  const double s = std::sin(op.phi0);
  const double c = std::cos(op.phi0);
  auto emf = [&](double x) { return std::hypot(u_ph + op.i0 * x * s, op.i0 * x * c); };

  AcScTrace tr;
  tr.e_q0_st = emf(m.x_st_ohm);
  tr.e_q0_t = emf(m.x_t_ohm);
  tr.i_kd_st = tr.e_q0_st / m.x_st_ohm;
  tr.i_kd_t = tr.e_q0_t / m.x_t_ohm;
  if (m.ikd) {
    tr.i_kd = *m.ikd;
  } else {
    if (!(m.xd_ohm > 0.0)) throw InputError("Ikd missing and Xd not given");
    tr.i_kd = tr.e_q0_t / m.xd_ohm;
    tr.ikd_source = ValueSource::Estimated;
  }
  const double a_st = tr.i_kd_st - tr.i_kd_t;
  const double a_t = tr.i_kd_t - tr.i_kd;
  const double dc0 = kSqrt2 * (tr.i_kd_st - op.i0 * s);

  tr.t.assign(tgrid.begin(), tgrid.end());
  tr.iac.reserve(tgrid.size());
  tr.idc.reserve(tgrid.size());
  tr.envelope.reserve(tgrid.size());
  for (double t : tgrid) {
    double iac = a_st * std::exp(-t / m.td_st) + a_t * std::exp(-t / m.td_t) + tr.i_kd;
    double idc = dc0 * std::exp(-t / m.tdc);
    tr.iac.push_back(iac);
    tr.idc.push_back(idc);
    tr.envelope.push_back(compose_peak(iac, idc));
  }
  return tr;
}

MachineScModel machine_model(const grid::GeneratorSpec& gen) {
  if (!gen.dynamics) throw InputError("generator '" + gen.id + "' has no dynamics block");
  const auto& d = *gen.dynamics;
  const double zbase = gen.voltage * gen.voltage / (gen.rated_kva * 1000.0);
  auto sc = to_short_circuit_constants(d.xd, d.xd_t, d.xd_st, d.td0_t, d.td0_st);
  MachineScModel m;
  m.x_st_ohm = d.xd_st * zbase;
  m.x_t_ohm = d.xd_t * zbase;
  m.xd_ohm = d.xd * zbase;
  m.td_t = sc.td_t;
  m.td_st = sc.td_st;
  m.ikd = d.ikd;
  if (d.tdc) {
    m.tdc = *d.tdc;
  } else {
    if (!(gen.winding_resistance > 0.0)) {
      throw InputError("generator '" + gen.id + "' needs tdc or a winding resistance");
    }
    m.tdc = m.x_st_ohm / (2.0 * grid::kPi * gen.frequency * gen.winding_resistance);
  }
  if (!(m.td_t > 0.0 && m.td_st > 0.0 && m.tdc > 0.0)) {
    throw InputError("generator '" + gen.id + "' has a non-positive time constant after conversion");
  }
  return m;
}

AcScTrace machine_sc_trace(const grid::GeneratorSpec& gen, const powerflow::OperatingPoint& op,
                           std::span<const double> tgrid) {
  auto m = machine_model(gen);
  auto tr = machine_sc_trace(m, op, tgrid);
  tr.contributor = gen.id;
  tr.bus = gen.bus;
  if (!gen.dynamics->tdc) tr.tdc_source = ValueSource::Estimated;
  return tr;
}

double motor_rated_current(const grid::LoadSpec& load, double bus_voltage) {
  return load.rated_kva * load.motor_fraction * 1000.0 / (grid::kSqrt3 * bus_voltage);
}

AcScTrace motor_group_sc_trace(const grid::LoadSpec& load, double bus_voltage, std::span<const double> tgrid,
                               double frequency) {
  if (!(load.motor_fraction > 0.0)) throw InputError("load '" + load.id + "' has no motor part to contribute");
  if (!load.xr_ratio) throw InputError("load '" + load.id + "' needs xr_ratio for its motor DC decay");
  const double i_m = load.locked_rotor_multiplier * motor_rated_current(load, bus_voltage);
  const double t_dc = *load.xr_ratio / (2.0 * grid::kPi * frequency);
  AcScTrace tr;
  tr.contributor = load.id;
  tr.bus = load.bus;
  tr.i_kd_st = i_m;
  tr.i_kd_t = 0.0;
  tr.i_kd = 0.0;
  tr.e_q0_st = tr.e_q0_t = bus_voltage / grid::kSqrt3;
  tr.t.assign(tgrid.begin(), tgrid.end());
  for (double t : tgrid) {
    double iac = i_m * std::exp(-t / load.motor_t_ac);
    double idc = kSqrt2 * i_m * std::exp(-t / t_dc);
    tr.iac.push_back(iac);
    tr.idc.push_back(idc);
    tr.envelope.push_back(compose_peak(iac, idc));
  }
  return tr;
}

AcScTrace vfd_contribution(const grid::ConverterSpec& conv, std::span<const double> tgrid) {
  return constant_trace(conv.id, conv.ac_bus, conv.sc_contribution_factor * conv.rated_current, tgrid);
}

FaultSummary fault_summary(const grid::GridModel& grid, const std::string& bus,
                           const powerflow::PowerflowSolution& sol, std::span<const double> tgrid) {
  const grid::Bus& fb = grid.bus(bus);
  if (fb.kind != grid::BusKind::AC) throw InputError("fault bus '" + bus + "' is a DC bus");

  FaultSummary fs;
  fs.bus = bus;
  fs.frequency = fb.frequency;
  fs.period = 1.0 / fb.frequency;
  const double half = fs.period / 2.0;
  const double half_grid[] = {half};

  grid::BusGraph graph(grid);
  std::vector<bool> reach(grid.buses.size(), false);
  for (std::size_t n : graph.reachable(graph.index(bus))) reach[n] = true;
  auto reachable = [&](const std::string& b) { return !b.empty() && reach[graph.index(b)]; };

  // Each contributor is evaluated on the grid and at T/2, then referred to the fault bus voltage.
  auto add = [&](AcScTrace tr, AcScTrace at_half, double v_source) {
    const double k = v_source / fb.nominal_voltage;
    scale_trace(tr, k);
    scale_trace(at_half, k);
    fs.half_cycle.push_back(
        {tr.contributor, at_half.iac[0], at_half.idc[0], compose_peak(at_half.iac[0], at_half.idc[0])});
    fs.contributors.push_back(std::move(tr));
  };

  for (const auto& gen : grid.generators) {
    if (!gen.online || !reachable(gen.bus)) continue;
    if (gen.infinite) throw InputError("generator '" + gen.id + "' is an infinite source; no decrement curve");
    const double v_nom = grid.bus(gen.bus).nominal_voltage;
    auto op = powerflow::prefault_operating_point(sol, gen.id, v_nom);
    add(machine_sc_trace(gen, op, tgrid), machine_sc_trace(gen, op, half_grid), v_nom);
  }
  for (const auto& load : grid.loads) {
    if (load.motor_fraction <= 0.0 || !load.converter.empty() || !reachable(load.bus)) continue;
    const grid::Bus& lb = grid.bus(load.bus);
    add(motor_group_sc_trace(load, lb.nominal_voltage, tgrid, lb.frequency),
        motor_group_sc_trace(load, lb.nominal_voltage, half_grid, lb.frequency), lb.nominal_voltage);
  }
  for (const auto& conv : grid.converters) {
    if (conv.kind == grid::ConverterKind::Charger || conv.kind == grid::ConverterKind::DcDc) continue;
    if (!reachable(conv.ac_bus)) continue;
    add(vfd_contribution(conv, tgrid), vfd_contribution(conv, half_grid), grid.bus(conv.ac_bus).nominal_voltage);
  }
  if (fs.contributors.empty()) throw InputError("no contributors reachable from bus '" + bus + "'");

  fs.t.assign(tgrid.begin(), tgrid.end());
  fs.iac_total.assign(tgrid.size(), 0.0);
  fs.idc_total.assign(tgrid.size(), 0.0);
  for (const auto& c : fs.contributors) {
    for (std::size_t k = 0; k < tgrid.size(); ++k) {
      fs.iac_total[k] += c.iac[k];
      fs.idc_total[k] += c.idc[k];
    }
  }
  for (const auto& h : fs.half_cycle) {
    fs.iac_half_cycle += h.iac;
    fs.idc_half_cycle += h.idc;
  }
  fs.ip = compose_peak(fs.iac_half_cycle, fs.idc_half_cycle);
  return fs;
}

}  // namespace vessel::sc
