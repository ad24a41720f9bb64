#include "vessel/sc/dc.hpp"

#include <algorithm>
#include <cmath>

#include "vessel/error.hpp"
#include "vessel/grid/topology.hpp"

namespace vessel::sc {
namespace {

struct Rlc {
  DcRegime regime;
  double delta;
  double w;  // wd (underdamped) or wh (overdamped), 0 when critical
};

Rlc classify(const grid::CapacitorBranch& cap) {
  const double l = cap.series_inductance;
  const double delta = cap.series_resistance / (2.0 * l);
  const double w0sq = 1.0 / (l * cap.capacitance);
  const double disc = delta * delta - w0sq;
  if (std::abs(disc) <= 1e-9 * w0sq) return {DcRegime::Critical, delta, 0.0};
  if (disc < 0.0) return {DcRegime::Underdamped, delta, std::sqrt(-disc)};
  return {DcRegime::Overdamped, delta, std::sqrt(disc)};
}

double rlc_current(const Rlc& m, const grid::CapacitorBranch& cap, double t) {
  const double ec = cap.initial_voltage;
  const double l = cap.series_inductance;
  switch (m.regime) {
    case DcRegime::Underdamped: return ec / (m.w * l) * std::exp(-m.delta * t) * std::sin(m.w * t);
    case DcRegime::Critical: return ec / l * t * std::exp(-m.delta * t);
    default:
      // e^(-dt) sinh(wt) without overflow for large t.
      return ec / (m.w * l) * 0.5 * (std::exp(-(m.delta - m.w) * t) - std::exp(-(m.delta + m.w) * t));
  }
}

double rlc_time_to_peak(const Rlc& m) {
  switch (m.regime) {
    case DcRegime::Underdamped: return std::atan(m.w / m.delta) / m.w;
    case DcRegime::Critical: return 1.0 / m.delta;
    default: return std::atanh(m.w / m.delta) / m.w;
  }
}

DcScTrace constant(std::string id, double level, std::span<const double> tgrid) {
  DcScTrace tr;
  tr.contributor = std::move(id);
  tr.t.assign(tgrid.begin(), tgrid.end());
  tr.i.assign(tgrid.size(), level);
  tr.peak_current = level;
  tr.time_to_peak = 0.0;
  tr.sustained = level;
  tr.regime = DcRegime::Constant;
  return tr;
}

// Sampled maximum and its time.
void sampled_peak(DcScTrace& tr) {
  if (tr.i.empty()) return;
  auto it = std::max_element(tr.i.begin(), tr.i.end());
  tr.peak_current = *it;
  tr.time_to_peak = tr.t[static_cast<std::size_t>(it - tr.i.begin())];
}

}  // namespace

std::string_view to_string(DcRegime r) {
  switch (r) {
    case DcRegime::Underdamped: return "underdamped";
    case DcRegime::Critical: return "critical";
    case DcRegime::Overdamped: return "overdamped";
    case DcRegime::ExponentialRise: return "exponential_rise";
    case DcRegime::Constant: return "constant";
  }
  return "?";
}

double capacitor_current(const grid::CapacitorBranch& cap, double t) { return rlc_current(classify(cap), cap, t); }

DcScTrace capacitor_sc_trace(const grid::CapacitorBranch& cap, std::span<const double> tgrid) {
  if (!(cap.capacitance > 0.0 && cap.series_resistance > 0.0 && cap.series_inductance > 0.0) ||
      cap.initial_voltage < 0.0) {
    throw InputError("capacitor '" + cap.id + "' needs C, R, L > 0 and EC >= 0");
  }
  const Rlc m = classify(cap);
  DcScTrace tr;
  tr.contributor = cap.id;
  tr.regime = m.regime;
  tr.t.assign(tgrid.begin(), tgrid.end());
  tr.i.reserve(tgrid.size());
  for (double t : tgrid) tr.i.push_back(rlc_current(m, cap, t));
  tr.time_to_peak = rlc_time_to_peak(m);
  tr.peak_current = rlc_current(m, cap, tr.time_to_peak);
  tr.sustained = 0.0;
  return tr;
}

DcScTrace battery_sc_trace(const grid::BatterySource& bat, std::span<const double> tgrid) {
  if (!(bat.sc_peak_current > 0.0 && bat.sc_time_constant > 0.0)) {
    throw InputError("battery '" + bat.id + "' is missing short-circuit datasheet parameters");
  }
  DcScTrace tr;
  tr.contributor = bat.id;
  tr.regime = DcRegime::ExponentialRise;
  tr.t.assign(tgrid.begin(), tgrid.end());
  tr.i.reserve(tgrid.size());
  for (double t : tgrid) tr.i.push_back(-bat.sc_peak_current * std::expm1(-t / bat.sc_time_constant));
  sampled_peak(tr);
  tr.sustained = bat.sc_peak_current;
  return tr;
}

DcScTrace converter_sc_contribution(const grid::ConverterSpec& conv, std::span<const double> tgrid) {
  const double level =
      conv.kind == grid::ConverterKind::Charger ? conv.sc_contribution_factor * conv.rated_current : 0.0;
  return constant(conv.id, level, tgrid);
}

DcFaultSummary dc_fault_summary(const grid::GridModel& grid, const std::string& bus, std::span<const double> tgrid) {
  const grid::Bus& fb = grid.bus(bus);
  if (fb.kind != grid::BusKind::DC) throw InputError("fault bus '" + bus + "' is an AC bus");

  grid::BusGraph graph(grid);
  std::vector<bool> reach(grid.buses.size(), false);
  for (std::size_t n : graph.reachable(graph.index(bus))) reach[n] = true;
  auto reachable = [&](const std::string& b) { return !b.empty() && reach[graph.index(b)]; };

  DcFaultSummary s;
  s.bus = bus;
  for (const auto& bat : grid.batteries) {
    if (!reachable(bat.bus)) continue;
    if (bat.soc < bat.min_soc) {
      s.warnings.push_back("battery " + bat.id + " below min_soc; contribution assumed SoC-independent");
    }
    s.contributors.push_back(battery_sc_trace(bat, tgrid));
  }
  for (const auto& conv : grid.converters) {
    if (!reachable(conv.dc_bus)) continue;
    s.contributors.push_back(converter_sc_contribution(conv, tgrid));
    if (conv.dc_link && conv.dc_link->enabled) s.contributors.push_back(capacitor_sc_trace(*conv.dc_link, tgrid));
  }
  if (s.contributors.empty()) throw InputError("DC bus '" + bus + "' is isolated: no contributors");

  s.total.contributor = "total";
  s.total.t.assign(tgrid.begin(), tgrid.end());
  s.total.i.assign(tgrid.size(), 0.0);
  const DcScTrace* dominant = &s.contributors.front();
  for (const auto& c : s.contributors) {
    for (std::size_t k = 0; k < tgrid.size(); ++k) s.total.i[k] += c.i[k];
    s.total.sustained += c.sustained;
    if (c.peak_current > dominant->peak_current) dominant = &c;
  }
  s.total.regime = dominant->regime;
  sampled_peak(s.total);
  return s;
}

}  // namespace vessel::sc
