#include "vessel/study/run.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vessel/error.hpp"
#include "vessel/powerflow/ac.hpp"
#include "vessel/protection/fuse.hpp"
#include "vessel/protection/sequence.hpp"
#include "vessel/sc/ac.hpp"
#include "vessel/sc/dc.hpp"
#include "vessel/sc/timegrid.hpp"
#include "vessel/tdsim/cct.hpp"
#include "vessel/tdsim/simulate.hpp"

namespace vessel::study {
namespace {

std::string file_stem(const std::string& id) {
  std::string s;
  for (char c : id) {
    if (c != '#') s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return s;
}

std::string flag(bool b) { return b ? "true" : "false"; }

// ---- powerflow -------------------------------------------------------------
void powerflow_tables(Report& r, const powerflow::PowerflowSolution& sol) {
  auto& buses = r.table("buses", {"bus", "v_pu", "angle_rad", "p_kw", "q_kvar", "energized"});
  for (const auto& b : sol.buses) {
    buses.rows.push_back({b.bus, num(b.v_pu), num(b.angle), num(b.p_kw), num(b.q_kvar), flag(b.energized)});
  }
  auto& el = r.table("elements", {"element", "bus", "p_kw", "q_kvar", "online"});
  for (const auto& e : sol.elements) el.rows.push_back({e.element, e.bus, num(e.p_kw), num(e.q_kvar), flag(e.online)});
  std::string slack;
  for (const auto& s : sol.slack_elements) slack += (slack.empty() ? "" : ",") + s;
  r.add("slack", slack);
  r.add("iterations", std::to_string(sol.iterations));
  r.add("max_mismatch_pu", sol.max_mismatch);
  r.add("losses_kw", sol.losses_kw);
}

// ---- sc-ac -----------------------------------------------------------------
void sc_ac(Report& r, const grid::GridModel& g, const StudyConfig& cfg) {
  const auto sol = powerflow::solve_ac_powerflow(g, cfg.powerflow);
  const auto grid_t = sc::default_ac_time_grid();
  const auto fs = sc::fault_summary(g, *cfg.fault_bus, sol, grid_t);
  auto& tab = r.table("summary", {"contributor", "ikd_st_a", "ikd_t_a", "ikd_a", "iac_half_a", "idc_half_a", "ip_a"});
  for (const auto& c : fs.contributors) {
    auto hc = std::find_if(fs.half_cycle.begin(), fs.half_cycle.end(),
                           [&](const auto& h) { return h.contributor == c.contributor; });
    tab.rows.push_back({c.contributor, num(c.i_kd_st), num(c.i_kd_t), num(c.i_kd), num(hc->iac), num(hc->idc),
                        num(hc->ip)});
  }
  tab.rows.push_back({"total", "", "", "", num(fs.iac_half_cycle), num(fs.idc_half_cycle), num(fs.ip)});
  auto& tr = r.table("trace", {"t_s", "iac_a", "idc_a", "envelope_a"});
  for (std::size_t k = 0; k < fs.t.size(); ++k) {
    tr.rows.push_back(
        {num(fs.t[k]), num(fs.iac_total[k]), num(fs.idc_total[k]), num(sc::compose_peak(fs.iac_total[k], fs.idc_total[k]))});
  }
  r.add("bus", fs.bus);
  r.add("iac_half_a", fs.iac_half_cycle);
  r.add("idc_half_a", fs.idc_half_cycle);
  r.add("ip_a", fs.ip);
}

// ---- sc-dc -----------------------------------------------------------------
void trace_table(Report& r, const std::string& name, const std::string& column, const sc::DcScTrace& t) {
  auto& tab = r.table(name, {"t_s", column});
  tab.rows.reserve(t.t.size());
  for (std::size_t k = 0; k < t.t.size(); ++k) tab.rows.push_back({num(t.t[k]), num(t.i[k])});
}

void sc_dc(Report& r, const grid::GridModel& g, const StudyConfig& cfg) {
  const auto ds = sc::dc_fault_summary(g, *cfg.fault_bus, sc::default_dc_time_grid());
  auto& tab = r.table("contributors", {"contributor", "peak_a", "time_to_peak_s", "sustained_a", "regime"});
  for (const auto& c : ds.contributors) {
    tab.rows.push_back({c.contributor, num(c.peak_current), num(c.time_to_peak), num(c.sustained),
                        std::string(sc::to_string(c.regime))});
  }
  for (const auto& c : ds.contributors) trace_table(r, file_stem(c.contributor), "i_a", c);
  trace_table(r, "total", "i_total_a", ds.total);
  r.add("bus", ds.bus);
  r.add("peak_total_a", ds.total.peak_current);
  r.add("time_to_peak_s", ds.total.time_to_peak);
  r.add("sustained_total_a", ds.total.sustained);
  r.add("sustained_total_ka", ds.total.sustained / 1000.0);
  for (const auto& w : ds.warnings) r.add("warning", w);
}

// ---- tdsim -----------------------------------------------------------------
std::vector<tdsim::ControllerConfig> fill_controllers(const grid::GridModel& g, std::vector<tdsim::ControllerConfig> cs) {
  for (auto& c : cs) {
    if (std::isnan(c.p_rating_kw)) {
      const auto* inv = g.find_converter(c.inverter);
      if (!inv) throw InputError("controller '" + c.id + "': unknown inverter '" + c.inverter + "'");
      c.p_rating_kw = inv->rated_kw;
    }
    if (std::isnan(c.q_rating_kvar)) c.q_rating_kvar = c.p_rating_kw;
    if (std::isnan(c.q_threshold_kvar)) {
      const auto* gen = g.find_generator(c.watched.front());
      if (!gen) throw InputError("controller '" + c.id + "' watches unknown generator '" + c.watched.front() + "'");
      c.q_threshold_kvar = tdsim::default_q_threshold_kvar(gen->rated_kva);
    }
  }
  return cs;
}

void tdsim_study(Report& r, const grid::GridModel& g, const StudyConfig& cfg) {
  const auto ts = tdsim::simulate(g, cfg.events, fill_controllers(g, cfg.controllers), cfg.sim);
  std::vector<std::string> header{"t_s"};
  header.insert(header.end(), ts.names.begin(), ts.names.end());
  auto& tab = r.table("timeseries", header);
  tab.rows.reserve(ts.t.size());
  for (std::size_t k = 0; k < ts.t.size(); ++k) {
    std::vector<std::string> row{num(ts.t[k])};
    for (const auto& ch : ts.data) row.push_back(num(ch[k]));
    tab.rows.push_back(std::move(row));
  }
  double worst = 0.0;
  for (double v : ts.channel("network.residual_kw")) worst = std::max(worst, std::abs(v));
  r.add("samples", std::to_string(ts.t.size()));
  r.add("channels", std::to_string(ts.names.size()));
  r.add("stopped_early", flag(ts.stopped_early));
  r.add("max_angle_separation_rad", ts.max_angle_separation);
  r.add("max_residual_kw", worst);
}

// ---- cct -------------------------------------------------------------------
void cct_study(Report& r, const grid::GridModel& g, const StudyConfig& cfg) {
  const auto& b = *cfg.cct;
  const auto res = tdsim::find_cct(g, b.fault, b.t_lo, b.t_hi, b.tol, b.options);
  auto& tab = r.table("transcript", {"clearing_s", "stable", "max_separation_rad"});
  for (const auto& p : res.transcript) tab.rows.push_back({num(p.clearing), flag(p.stable), num(p.max_separation)});
  r.add("machine", b.fault.machine);
  r.add("loading", b.fault.loading);
  r.add("cct_s", res.cct);
  r.add("lo_s", res.lo);
  r.add("hi_s", res.hi);
  r.add("monotone", flag(res.monotone));
  r.negative = !res.monotone;
}

// ---- protect ---------------------------------------------------------------
void protect_study(Report& r, const grid::GridModel& g, const StudyConfig& cfg) {
  const auto sol = powerflow::solve_ac_powerflow(g, cfg.powerflow);
  const auto fs = sc::fault_summary(g, *cfg.fault_bus, sol, std::vector<double>{1.0 / (2.0 * g.bus(*cfg.fault_bus).frequency)});
  const auto seq = protection::sequence_of_operations(g, fs, {cfg.protect.zsi, cfg.protect.failed});
  const auto sel = protection::selectivity_check(seq.events, cfg.protect.cct_budget, seq.intended);
  auto& trips = r.table("trips", {"breaker_id", "t_trip_s", "cause", "locked"});
  for (const auto& e : seq.events) trips.rows.push_back({e.breaker, num(e.time), std::string(protection::to_string(e.cause)), flag(e.locked)});
  auto& cur = r.table("currents", {"breaker_id", "i_a", "forward"});
  for (const auto& f : seq.graph.flows) cur.rows.push_back({f.breaker, num(f.current), flag(f.forward)});
  auto& locks = r.table("locks", {"from", "to"});
  for (const auto& l : seq.zsi.trace) locks.rows.push_back({l.from, l.to});
  r.add("bus", fs.bus);
  r.add("zsi", flag(cfg.protect.zsi));
  r.add("selective", flag(sel.selective));
  r.add("cleared_within_cct", flag(sel.cleared_within_cct));
  r.add("first_trip_s", sel.first_trip);
  r.add("margin_s", sel.margin);
  for (const auto& f : sel.failures) r.add("failure", f);
  r.negative = !sel.selective || !sel.cleared_within_cct;
}

// ---- i2t -------------------------------------------------------------------
std::pair<std::vector<double>, std::vector<double>> read_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open trace '" + path + "'");
  std::vector<double> t, i;
  std::string line;
  std::size_t line_no = 0;
  auto parse = [&](std::string_view s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw ParseError("bad number '" + std::string(s) + "' in trace", line_no, 1);
    }
    return v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 || line.empty()) continue;  // header
    const auto c1 = line.find(',');
    if (c1 == std::string::npos) throw ParseError("trace rows need two columns", line_no, 1);
    const auto c2 = line.find(',', c1 + 1);
    t.push_back(parse(std::string_view(line).substr(0, c1)));
    i.push_back(parse(std::string_view(line).substr(c1 + 1, c2 == std::string::npos ? std::string::npos : c2 - c1 - 1)));
  }
  return {t, i};
}

void fuse_row(Report& r, Table& tab, const protection::FuseResult& f, const std::string& key) {
  tab.rows.push_back({f.fuse, num(f.rating), f.t_clear ? num(*f.t_clear) : "NOT_CLEARED", num(f.let_through)});
  r.add(key, f.t_clear ? num(*f.t_clear) : "NOT_CLEARED");
  if (!f.cleared()) r.negative = true;
}

void i2t_study(Report& r, const StudyConfig& cfg) {
  auto& tab = r.table("fuses", {"fuse_id", "i2t_rating", "t_clear_s", "let_through_a2s"});
  if (cfg.i2t.trace) {
    const auto [t, i] = read_trace(*cfg.i2t.trace);
    grid::FuseSpec fuse{"trace", "", *cfg.i2t.fuse_i2t, std::nullopt};
    fuse_row(r, tab, protection::fuse_i2t_clearing(t, i, fuse), "t_clear_s");
    return;
  }
  const auto g = resolve_grid(cfg);
  const auto ds = sc::dc_fault_summary(g, *cfg.fault_bus, sc::default_dc_time_grid());
  for (const auto& fuse : g.fuses) {
    // The fuse carries its element's contribution plus that element's DC-link discharge.
    const auto* conv = g.find_converter(fuse.element);
    std::vector<double> i(ds.total.t.size(), 0.0);
    bool any = false;
    for (const auto& c : ds.contributors) {
      const bool own = c.contributor == fuse.element || (conv && conv->dc_link && conv->dc_link->id == c.contributor);
      if (!own) continue;
      any = true;
      for (std::size_t k = 0; k < i.size(); ++k) i[k] += c.i[k];
    }
    if (!any) continue;
    fuse_row(r, tab, protection::fuse_i2t_clearing(ds.total.t, i, fuse), "t_clear_s." + fuse.id);
  }
  if (tab.rows.empty()) throw InputError("i2t: no fuse sees fault current at '" + *cfg.fault_bus + "'");
}

}  // namespace

Report compute_study(const StudyConfig& cfg) {
  check_required(cfg);
  Report r;
  r.add("study", std::string(to_string(cfg.kind)));
  if (cfg.kind == StudyKind::I2t) {
    i2t_study(r, cfg);
    return r;
  }
  const auto g = resolve_grid(cfg);
  r.add("grid", g.name);
  switch (cfg.kind) {
    case StudyKind::Powerflow: powerflow_tables(r, powerflow::solve_ac_powerflow(g, cfg.powerflow)); break;
    case StudyKind::ScAc: sc_ac(r, g, cfg); break;
    case StudyKind::ScDc: sc_dc(r, g, cfg); break;
    case StudyKind::Tdsim: tdsim_study(r, g, cfg); break;
    case StudyKind::Cct: cct_study(r, g, cfg); break;
    case StudyKind::Protect: protect_study(r, g, cfg); break;
    case StudyKind::I2t: break;
  }
  return r;
}

int run_study(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Vessel power-system studies"};
  std::string kind, format = "csv", out_dir;
  std::optional<std::string> study, bus, trace;
  std::optional<double> fuse_i2t;
  StudyConfig cfg;
  app.add_option("kind", kind, "powerflow | sc-ac | sc-dc | tdsim | cct | protect | i2t")->required();
  app.add_option("--grid", cfg.grid, "grid file, builtin:<fixture> or fixture name");
  app.add_option("--study", study, "study file");
  app.add_option("--out", out_dir, "output directory (VESSEL_STUDY_OUT overrides)");
  app.add_option("--format", format, "csv | text")->check(CLI::IsMember({"csv", "text"}));
  app.add_flag("--strict", cfg.strict, "exit 4 on a negative study result");
  app.add_option("--bus", bus, "fault bus");
  app.add_option("--trace", trace, "i2t: current trace CSV");
  app.add_option("--fuse-i2t", fuse_i2t, "i2t: fuse rating, A^2 s");
  app.add_flag("--enable-capacitors", cfg.enable_capacitors, "enable converter DC-link capacitors");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    cfg.kind = parse_study_kind(kind);
    cfg.format = format == "text" ? Format::Text : Format::Csv;
    if (const char* env = std::getenv("VESSEL_STUDY_OUT"); env && *env) out_dir = env;
    if (out_dir.empty()) throw InputError("--out (or VESSEL_STUDY_OUT) is required");
    cfg.out_dir = out_dir;
    if (cfg.grid.empty() && !(cfg.kind == StudyKind::I2t && trace)) throw InputError("--grid is required");
    if (study) {
      cfg.study_path = study;
      std::ifstream in(*study, std::ios::binary);
      if (!in) throw InputError("cannot open study file '" + *study + "'");
      std::ostringstream buf;
      buf << in.rdbuf();
      try {
        apply_study_text(cfg, buf.str());
      } catch (const ParseError& e) {
        throw InputError(*study + ": " + e.what());
      }
    }
    if (bus) cfg.fault_bus = bus;
    if (trace) cfg.i2t.trace = trace;
    if (fuse_i2t) cfg.i2t.fuse_i2t = fuse_i2t;

    const auto report = compute_study(cfg);
    emit_report(report, cfg.out_dir, cfg.format);
    out << render_summary(report);
    return cfg.strict && report.negative ? kNegativeResult : kOk;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  }
}

int run_study(int argc, const char* const* argv) { return run_study(argc, argv, std::cout, std::cerr); }

}  // namespace vessel::study
