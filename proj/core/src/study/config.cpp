#include "vessel/study/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "vessel/error.hpp"

namespace vessel::study {
namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

double number(const grid::Entry& e) {
  double v = 0.0;
  const char* first = e.value.data() + (e.value.front() == '+' ? 1 : 0);
  const char* last = e.value.data() + e.value.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ParseError("expected a number for '" + e.key + "', got '" + e.value + "'", e.line, e.column);
  }
  return v;
}

int integer(const grid::Entry& e) {
  const double v = number(e);
  if (v != std::floor(v)) throw ParseError("expected an integer for '" + e.key + "'", e.line, e.column);
  return static_cast<int>(v);
}

bool boolean(const grid::Entry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  throw ParseError("expected true/false for '" + e.key + "'", e.line, e.column);
}

std::vector<std::string> list(const grid::Entry& e) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= e.value.size()) {
    auto comma = e.value.find(',', pos);
    if (comma == std::string::npos) comma = e.value.size();
    auto item = e.value.substr(pos, comma - pos);
    while (!item.empty() && item.front() == ' ') item.erase(item.begin());
    while (!item.empty() && item.back() == ' ') item.pop_back();
    if (item.empty()) throw ParseError("empty item in list '" + e.key + "'", e.line, e.column);
    out.push_back(item);
    pos = comma + 1;
  }
  return out;
}

using Handler = std::function<void(const grid::Entry&)>;

void dispatch(const grid::Section& s, const std::map<std::string, Handler>& keys) {
  for (const auto& e : s.entries) {
    auto it = keys.find(e.key);
    if (it == keys.end()) throw ParseError("unknown key '" + e.key + "' in [" + s.kind + "]", e.line, e.column);
    it->second(e);
  }
}

std::map<std::string, Handler> sim_keys(tdsim::SimConfig& sim) {
  return {
      {"step_s", [&](const grid::Entry& e) { sim.step = number(e); }},
      {"end_s", [&](const grid::Entry& e) { sim.end = number(e); }},
      {"integrator",
       [&](const grid::Entry& e) {
         if (e.value == "rk4") sim.integrator = tdsim::Integrator::Rk4;
         else if (e.value == "trapezoidal") sim.integrator = tdsim::Integrator::Trapezoidal;
         else throw ParseError("integrator must be rk4|trapezoidal", e.line, e.column);
       }},
      {"network_interval", [&](const grid::Entry& e) { sim.network_interval = integer(e); }},
      {"network_tol", [&](const grid::Entry& e) { sim.network_tol = number(e); }},
      {"network_max_iter", [&](const grid::Entry& e) { sim.network_max_iter = integer(e); }},
      {"stop_angle_rad", [&](const grid::Entry& e) { sim.stop_angle = number(e); }},
      {"slack", [&](const grid::Entry& e) { sim.slack = e.value; }},
  };
}

tdsim::Event parse_event(const grid::Section& s) {
  tdsim::Event ev;
  bool has_time = false, has_action = false;
  dispatch(s, {
                  {"time_s", [&](const grid::Entry& e) { ev.time = number(e), has_time = true; }},
                  {"action",
                   [&](const grid::Entry& e) {
                     using A = tdsim::Action;
                     static const std::map<std::string, A> names{{"load_step", A::LoadStep},
                                                                 {"breaker_open", A::BreakerOpen},
                                                                 {"breaker_close", A::BreakerClose},
                                                                 {"fault_apply", A::FaultApply},
                                                                 {"fault_clear", A::FaultClear}};
                     auto it = names.find(e.value);
                     if (it == names.end()) throw ParseError("unknown action '" + e.value + "'", e.line, e.column);
                     ev.action = it->second;
                     has_action = true;
                   }},
                  {"target", [&](const grid::Entry& e) { ev.target = e.value; }},
                  {"scale", [&](const grid::Entry& e) { ev.scale = number(e); }},
                  {"ramp_s", [&](const grid::Entry& e) { ev.ramp = number(e); }},
                  {"location", [&](const grid::Entry& e) { ev.location = number(e); }},
              });
  if (!has_time || !has_action) throw ParseError("[event " + s.id + "] needs time_s and action", s.line, 1);
  return ev;
}

tdsim::ControllerConfig parse_controller(const grid::Section& s) {
  tdsim::ControllerConfig c;
  c.id = s.id;
  c.p_rating_kw = c.q_rating_kvar = c.q_threshold_kvar = c.p_threshold_kw = kUnset;
  dispatch(s, {
                  {"mode",
                   [&](const grid::Entry& e) {
                     if (e.value == "peak_shave") c.mode = tdsim::ControllerMode::PeakShave;
                     else if (e.value == "dp_failover") c.mode = tdsim::ControllerMode::DpFailover;
                     else throw ParseError("mode must be peak_shave|dp_failover", e.line, e.column);
                   }},
                  {"inverter", [&](const grid::Entry& e) { c.inverter = e.value; }},
                  {"watched", [&](const grid::Entry& e) { c.watched = list(e); }},
                  {"p_threshold_kw", [&](const grid::Entry& e) { c.p_threshold_kw = number(e); }},
                  {"q_threshold_kvar", [&](const grid::Entry& e) { c.q_threshold_kvar = number(e); }},
                  {"p_rating_kw", [&](const grid::Entry& e) { c.p_rating_kw = number(e); }},
                  {"q_rating_kvar", [&](const grid::Entry& e) { c.q_rating_kvar = number(e); }},
                  {"dp_delay_s", [&](const grid::Entry& e) { c.dp_delay = number(e); }},
              });
  if (c.inverter.empty() || c.watched.empty()) {
    throw ParseError("[controller " + s.id + "] needs inverter and watched", s.line, 1);
  }
  if (c.mode == tdsim::ControllerMode::PeakShave && std::isnan(c.p_threshold_kw)) {
    throw ParseError("[controller " + s.id + "] peak_shave needs p_threshold_kw", s.line, 1);
  }
  if (std::isnan(c.p_threshold_kw)) c.p_threshold_kw = 0.0;
  return c;
}

}  // namespace

StudyKind parse_study_kind(std::string_view text) {
  std::string k(text);
  for (auto& ch : k) {
    if (ch == '-') ch = '_';
  }
  static const std::map<std::string, StudyKind, std::less<>> kinds{
      {"powerflow", StudyKind::Powerflow}, {"sc_ac", StudyKind::ScAc}, {"sc_dc", StudyKind::ScDc},
      {"tdsim", StudyKind::Tdsim},         {"cct", StudyKind::Cct},    {"protect", StudyKind::Protect},
      {"i2t", StudyKind::I2t}};
  auto it = kinds.find(k);
  if (it == kinds.end()) throw InputError("unknown study kind '" + std::string(text) + "'");
  return it->second;
}

std::string_view to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::Powerflow: return "powerflow";
    case StudyKind::ScAc: return "sc_ac";
    case StudyKind::ScDc: return "sc_dc";
    case StudyKind::Tdsim: return "tdsim";
    case StudyKind::Cct: return "cct";
    case StudyKind::Protect: return "protect";
    case StudyKind::I2t: return "i2t";
  }
  return "?";
}

void apply_study_text(StudyConfig& cfg, std::string_view text) {
  for (const auto& s : grid::read_sections(text)) {
    if (s.kind == "modify") {
      if (s.id.empty()) throw ParseError("[modify] needs an element id", s.line, 2);
      cfg.modifications.push_back(s);
      continue;
    }
    if (s.kind == "event") {
      cfg.events.events.push_back(parse_event(s));
      continue;
    }
    if (s.kind == "controller") {
      cfg.controllers.push_back(parse_controller(s));
      continue;
    }
    if (!s.id.empty()) throw ParseError("[" + s.kind + "] takes no id", s.line, 2);
    if (s.kind == "powerflow") {
      dispatch(s, {{"slack", [&](const grid::Entry& e) { cfg.powerflow.slack = e.value; }},
                   {"tol", [&](const grid::Entry& e) { cfg.powerflow.tol = number(e); }},
                   {"max_iter", [&](const grid::Entry& e) { cfg.powerflow.max_iter = integer(e); }}});
    } else if (s.kind == "fault") {
      dispatch(s, {{"bus", [&](const grid::Entry& e) { cfg.fault_bus = e.value; }},
                   {"enable_capacitors", [&](const grid::Entry& e) { cfg.enable_capacitors = boolean(e); }}});
    } else if (s.kind == "sim") {
      dispatch(s, sim_keys(cfg.sim));
    } else if (s.kind == "cct") {
      CctBlock b;
      auto keys = sim_keys(b.options.sim);
      keys.erase("end_s");
      keys.erase("stop_angle_rad");
      keys.erase("slack");
      keys.insert({
          {"machine", [&](const grid::Entry& e) { b.fault.machine = e.value; }},
          {"loading", [&](const grid::Entry& e) { b.fault.loading = number(e); }},
          {"location", [&](const grid::Entry& e) { b.fault.location = number(e); }},
          {"branch", [&](const grid::Entry& e) { b.fault.branch = e.value; }},
          {"t_lo_s", [&](const grid::Entry& e) { b.t_lo = number(e); }},
          {"t_hi_s", [&](const grid::Entry& e) { b.t_hi = number(e); }},
          {"tol_s", [&](const grid::Entry& e) { b.tol = number(e); }},
          {"fault_time_s", [&](const grid::Entry& e) { b.options.fault_time = number(e); }},
          {"post_window_s", [&](const grid::Entry& e) { b.options.post_window = number(e); }},
      });
      dispatch(s, keys);
      if (b.fault.machine.empty()) throw ParseError("[cct] needs machine", s.line, 1);
      cfg.cct = b;
    } else if (s.kind == "protect") {
      dispatch(s, {{"zsi", [&](const grid::Entry& e) { cfg.protect.zsi = boolean(e); }},
                   {"failed", [&](const grid::Entry& e) { cfg.protect.failed = list(e); }},
                   {"cct_budget_s", [&](const grid::Entry& e) { cfg.protect.cct_budget = number(e); }}});
    } else if (s.kind == "i2t") {
      dispatch(s, {{"trace", [&](const grid::Entry& e) { cfg.i2t.trace = e.value; }},
                   {"fuse_i2t", [&](const grid::Entry& e) { cfg.i2t.fuse_i2t = number(e); }}});
    } else {
      throw ParseError("unknown study block [" + s.kind + "]", s.line, 2);
    }
  }
}

grid::GridModel resolve_grid(const StudyConfig& cfg) {
  auto g = grid::load_grid(cfg.grid);
  for (const auto& m : cfg.modifications) grid::apply_modification(g, m);
  if (cfg.enable_capacitors) {
    for (auto& c : g.converters) {
      if (c.dc_link) c.dc_link->enabled = true;
    }
  }
  return g;
}

void check_required(const StudyConfig& cfg) {
  switch (cfg.kind) {
    case StudyKind::ScAc:
    case StudyKind::ScDc:
    case StudyKind::Protect:
      if (!cfg.fault_bus) throw InputError(std::string(to_string(cfg.kind)) + " needs a fault bus (--bus or [fault])");
      break;
    case StudyKind::Cct:
      if (!cfg.cct) throw InputError("cct needs a [cct] block");
      break;
    case StudyKind::I2t:
      if (cfg.i2t.trace.has_value() != cfg.i2t.fuse_i2t.has_value()) {
        throw InputError("i2t: --trace and --fuse-i2t go together");
      }
      if (!cfg.i2t.trace && !cfg.fault_bus) throw InputError("i2t needs --trace/--fuse-i2t or a DC fault bus");
      break;
    case StudyKind::Powerflow:
    case StudyKind::Tdsim:
      break;
  }
}

}  // namespace vessel::study
