// One PASS/FAIL line per acceptance criterion. `--criterion N` runs one and
// exits nonzero if it fails; no argument runs all of them.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "scenarios.hpp"
#include "vessel/grid/fixtures.hpp"
#include "vessel/powerflow/ac.hpp"
#include "vessel/protection/fuse.hpp"
#include "vessel/protection/sequence.hpp"
#include "vessel/sc/ac.hpp"
#include "vessel/sc/dc.hpp"
#include "vessel/sc/timegrid.hpp"
#include "vessel/tdsim/cct.hpp"
#include "vessel/tdsim/simulate.hpp"

namespace fs = std::filesystem;
using namespace vessel;

namespace {

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [X]");
  }
};

bool within(double got, double want, double rel) { return std::abs(got - want) <= rel * std::abs(want); }

std::string g(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

sc::FaultSummary half_cycle_summary(const grid::GridModel& grid, const std::string& bus) {
  return sc::fault_summary(grid, bus, powerflow::solve_ac_powerflow(grid), std::vector<double>{1.0 / 120.0});
}

void c1(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cap = scenarios::fig6_capacitor();
  const auto tr = sc::capacitor_sc_trace(cap, sc::default_dc_time_grid());
  auto other = cap;
  other.initial_voltage = 100.0;
  const auto tr100 = sc::capacitor_sc_trace(other, sc::default_dc_time_grid());
  const double dt = seconds_since(t0);
  c.expect(within(tr.time_to_peak, 0.134e-3, 0.02), "tp=" + g(tr.time_to_peak * 1e3) + " ms");
  c.expect(tr100.time_to_peak == tr.time_to_peak, "tp independent of EC");
  c.expect(within(tr.peak_current, 6950.0, 0.02), "peak=" + g(tr.peak_current / 1e3) + " kA");
  c.expect(dt < 1.0, "runtime=" + g(dt) + " s");
}

void c2(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto tr = sc::capacitor_sc_trace(scenarios::fig6_capacitor(), sc::default_dc_time_grid());
  const auto r = protection::fuse_i2t_clearing(tr, {"F", "CAP", 9350.0, std::nullopt});
  const double dt = seconds_since(t0);
  if (r.cleared()) {
    c.expect(within(*r.t_clear, 0.351e-3, 0.03), "t_clear=" + g(*r.t_clear * 1e3) + " ms");
  } else {
    c.expect(false, "NOT_CLEARED, total let-through " + g(r.let_through) + " A2s below rating 9350 A2s");
  }
  c.expect(dt < 1.0, "runtime=" + g(dt) + " s");
}

void c3(Check& c) {
  const double triples[4][3] = {
      {13.759, 16.311, 35.769}, {17.971, 21.076, 46.490}, {12.733, 15.458, 33.521}, {7.035, 7.689, 17.638}};
  for (const auto& t : triples) {
    const double ip = sc::compose_peak(t[0], t[1]);
    c.expect(within(ip, t[2], 0.002), "ip=" + g(ip) + " vs " + g(t[2]));
  }
}

void c4(Check& c) {
  const auto dc = grid::builtin_fixture(grid::FixtureName::DcVessel);
  const auto s = sc::dc_fault_summary(dc, "DC_PS", sc::default_dc_time_grid());
  c.expect(s.total.sustained == 16175.0, "sustained=" + g(s.total.sustained) + " A");
  const auto bat = *dc.find_battery("BAT_PS");
  const double tau = bat.sc_time_constant;
  const auto tr = sc::battery_sc_trace(bat, std::vector<double>{tau});
  const double closed = bat.sc_peak_current * (1.0 - std::exp(-1.0));
  c.expect(within(tr.i[0], closed, 0.001), "i(tau)=" + g(tr.i[0]) + " A");
  c.expect(within(tr.i[0], 9419.0, 0.001), "vs 9.419 kA");
}

void c5(Check& c) {
  const auto dc = grid::builtin_fixture(grid::FixtureName::DcVessel);
  const auto ch = *dc.find_converter("CH1");
  const auto tr = sc::converter_sc_contribution(ch, std::vector<double>{0.0, 1e-3});
  c.expect(ch.rated_current == 850.0 && ch.sc_contribution_factor == 1.5, "850 A at 1.5");
  c.expect(tr.i.back() == 1275.0 && tr.sustained == 1275.0, "contribution=" + g(tr.sustained) + " A");
}

void c6(Check& c) {
  const auto ac = grid::builtin_fixture(grid::FixtureName::AcVessel);
  const auto fs = half_cycle_summary(ac, "DG01_S");
  const double budget = 0.542;

  const auto off = protection::sequence_of_operations(ac, fs, {false, {}});
  bool all216 = off.events.size() == off.zsi.detecting.size() && !off.events.empty();
  for (const auto& e : off.events) all216 = all216 && e.time == 0.216;
  c.expect(all216, std::to_string(off.events.size()) + " detecting breakers at 216 ms");
  c.expect(0.216 < budget, "216 ms < 542 ms");

  const auto on = protection::sequence_of_operations(ac, fs, {true, {}});
  double nearest = INFINITY, first_locked = INFINITY, last_unlocked = -INFINITY;
  for (const auto& e : on.events) {
    if (e.locked) {
      first_locked = std::min(first_locked, e.time);
    } else {
      nearest = std::min(nearest, e.time);
      last_unlocked = std::max(last_unlocked, e.time);
    }
  }
  c.expect(last_unlocked < first_locked, "nearest " + g(nearest * 1e3) + " ms before backups " +
                                             g(first_locked * 1e3) + " ms");
  const auto sel = protection::selectivity_check(on.events, budget, on.intended);
  c.expect(sel.selective && sel.cleared_within_cct, "selective within budget");

  std::vector<std::string> failed(on.zsi.nearest.begin(), on.zsi.nearest.end());
  const auto fail = protection::sequence_of_operations(ac, fs, {true, failed});
  bool backups = !fail.events.empty();
  double last = 0.0;
  for (const auto& e : fail.events) {
    backups = backups && std::isfinite(e.time) &&
              std::find(failed.begin(), failed.end(), e.breaker) == failed.end();
    last = std::max(last, e.time);
  }
  c.expect(backups, "with nearest failed, " + std::to_string(fail.events.size()) + " backups clear by " +
                        g(last * 1e3) + " ms");
}

void c7(Check& c) {
  {
    const auto s = scenarios::peak_shave();
    const auto ts = tdsim::simulate(s.grid, s.events, s.controllers, s.sim);
    const auto& p = ts.channel("DG#01.p_kw");
    const auto& inv = ts.channel("INV_BAT_PS.p_kw");
    double step = 0.0, over = -INFINITY, lo = INFINITY, hi = -INFINITY;
    for (std::size_t k = 1; k < p.size(); ++k) step = std::max(step, (p[k] + inv[k]) - (p[k - 1] + inv[k - 1]));
    for (std::size_t k = 0; k < p.size(); ++k) {
      over = std::max(over, p[k] - 1500.0);
      lo = std::min(lo, inv[k]);
      hi = std::max(hi, inv[k]);
    }
    c.expect(over <= step + 1e-6, "peak shave overshoot " + g(over) + " kW vs ramp step " + g(step) + " kW");
    c.expect(lo >= 0.0 && hi <= 1500.0, "inverter P in [" + g(lo) + ", " + g(hi) + "] kW");
  }
  {
    const auto s = scenarios::dp_failover();
    const auto ts = tdsim::simulate(s.grid, s.events, s.controllers, s.sim);
    const auto at = [&](double t) { return static_cast<std::size_t>(std::llround(t / s.sim.step)); };
    const auto& dg1 = ts.channel("DG#01.p_kw");
    const auto& dg2 = ts.channel("DG#02.p_kw");
    const auto& inv = ts.channel("INV_BAT_PS.p_kw");
    const double trip = 2.0, delay = s.controllers.front().dp_delay;
    const double latched = std::min(1500.0, dg2[at(trip - delay)]);
    bool holds = true;
    for (std::size_t k = at(trip) + 1; k < inv.size(); ++k) holds = holds && std::abs(inv[k] - latched) <= 1e-9;
    c.expect(holds, "DP latch " + g(inv.back()) + " kW = delayed pre-trip " + g(latched) + " kW");
    const double pre = dg1[at(trip) - 1], after = dg1[at(trip + 5.0)];
    c.expect(within(after, pre, 0.02), "surviving gen " + g(after) + " kW vs pre-event " + g(pre) + " kW at +5 s");
  }
}

void c8(Check& c) {
  const auto smib = scenarios::smib();
  const auto r = tdsim::find_cct(smib, {"G", 0.9, 0.0, ""}, 0.0, 0.5, 1e-3);
  const double oracle = scenarios::smib_oracle().cct;
  c.expect(r.hi - r.lo <= 1e-3, "bracket " + g((r.hi - r.lo) * 1e3) + " ms");
  c.expect(std::abs(r.cct - oracle) <= 2e-3, "SMIB cct " + g(r.cct * 1e3) + " ms vs equal-area " + g(oracle * 1e3) + " ms");
  const auto r95 = tdsim::find_cct(smib, {"G", 0.95, 0.0, ""}, 0.0, 0.5, 1e-3);
  c.expect(r95.cct <= r.cct, "SMIB 95 % " + g(r95.cct * 1e3) + " ms <= 90 %");
  const auto ac = grid::builtin_fixture(grid::FixtureName::AcVessel);
  const tdsim::CctFault f90{"DG#01", 0.9, 0.01, "C_DG01"}, f95{"DG#01", 0.95, 0.01, "C_DG01"};
  const auto a = tdsim::find_cct(ac, f90, 0.0, 2.0, 1e-3);
  const auto b = tdsim::find_cct(ac, f95, 0.0, 2.0, 1e-3);
  c.expect(b.cct <= a.cct, "DG#01 95 % " + g(b.cct * 1e3) + " ms <= 90 % " + g(a.cct * 1e3) + " ms");
}

void c9(Check& c) {
  const auto cap = scenarios::fig6_capacitor();
  const double tau = 2 * cap.series_inductance / cap.series_resistance;
  const auto tg = sc::uniform_time_grid(0.0, 20 * tau, 1e-8);
  const auto tr = sc::capacitor_sc_trace(cap, tg);
  double e = 0.0;
  for (std::size_t k = 1; k < tg.size(); ++k) e += 0.5 * (tg[k] - tg[k - 1]) * (tr.i[k] * tr.i[k] + tr.i[k - 1] * tr.i[k - 1]);
  e *= cap.series_resistance;
  const double stored = 0.5 * cap.capacitance * cap.initial_voltage * cap.initial_voltage;
  c.expect(within(e, stored, 0.005), "RLC energy " + g(e) + " J vs " + g(stored) + " J");

  for (auto name : {grid::FixtureName::AcVessel, grid::FixtureName::DcVessel}) {
    const auto sol = powerflow::solve_ac_powerflow(grid::builtin_fixture(name));
    c.expect(sol.max_mismatch <= 1e-8, "mismatch " + g(sol.max_mismatch) + " pu");
  }

  double worst = 0.0;
  for (const auto& s : {scenarios::peak_shave(), scenarios::dp_failover()}) {
    const auto ts = tdsim::simulate(s.grid, s.events, s.controllers, s.sim);
    const double base_kw = s.grid.base_mva * 1000.0;
    for (double r : ts.channel("network.residual_kw")) worst = std::max(worst, std::abs(r) / base_kw);
  }
  c.expect(worst <= 1e-8, "step power residual " + g(worst) + " pu");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Kind and grid for a study file, from its name.
std::pair<std::string, std::string> study_target(const std::string& stem) {
  const auto starts = [&](const char* p) { return stem.rfind(p, 0) == 0; };
  if (starts("cct")) return {"cct", "ac_vessel"};
  if (starts("protect")) return {"protect", "ac_vessel"};
  if (starts("sc_ac")) return {"sc-ac", "ac_vessel"};
  if (starts("sc_dc")) return {"sc-dc", "dc_vessel"};
  if (starts("i2t")) return {"i2t", "dc_vessel"};
  return {"tdsim", "ac_vessel"};
}

void c10(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path root = fs::temp_directory_path() / "vessel_acceptance_c10";
  fs::remove_all(root);
  std::vector<std::pair<std::string, std::string>> runs;  // name, arguments
  for (const char* grid : {"ac_vessel", "dc_vessel"}) runs.push_back({std::string("pf_") + grid, std::string("powerflow --grid ") + grid});
  std::vector<fs::path> studies;
  for (const auto& e : fs::directory_iterator(VESSEL_STUDIES_DIR)) {
    if (e.path().extension() == ".study") studies.push_back(e.path());
  }
  std::sort(studies.begin(), studies.end());
  for (const auto& p : studies) {
    const auto [kind, grid] = study_target(p.stem().string());
    runs.push_back({p.stem().string(), kind + " --grid " + grid + " --study '" + p.string() + "'"});
  }
  std::size_t files = 0, mismatched = 0, failed = 0;
  for (const auto& [name, args] : runs) {
    fs::path out[2] = {root / "a" / name, root / "b" / name};
    for (const auto& o : out) {
      const auto cmd = std::string("'") + VESSEL_STUDY_BIN + "' " + args + " --out '" + o.string() + "' > /dev/null 2>&1";
      const int rc = std::system(cmd.c_str());
      if (rc != 0) {
        ++failed;
        c.expect(false, name + " exited " + std::to_string(rc));
      }
    }
    if (!fs::exists(out[0])) continue;
    for (const auto& e : fs::directory_iterator(out[0])) {
      ++files;
      if (slurp(e.path()) != slurp(out[1] / e.path().filename())) {
        ++mismatched;
        c.expect(false, name + "/" + e.path().filename().string() + " differs");
      }
    }
  }
  fs::remove_all(root);
  c.expect(mismatched == 0 && failed == 0 && files > 0,
           std::to_string(runs.size()) + " studies x2, " + std::to_string(files) + " artifacts byte-identical");
  c.expect(seconds_since(t0) < 60.0, "runtime " + g(seconds_since(t0)) + " s");
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(Check&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "capacitor discharge", c1},  {2, "fuse clearing", c2},
      {3, "composition identity", c3}, {4, "DC aggregation", c4},
      {5, "charger contribution", c5}, {6, "protection timing", c6},
      {7, "controller properties", c7}, {8, "CCT machinery", c8},
      {9, "conservation", c9},         {10, "determinism", c10},
  };
  return all;
}

bool report(const Criterion& k) {
  Check c;
  try {
    k.run(c);
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  std::cout << (c.pass ? "PASS" : "FAIL") << " C" << k.id << " " << k.name << ": " << c.detail.str() << "\n";
  return c.pass;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: vessel_acceptance [--criterion N]\n";
      return 2;
    }
  }
  bool ok = true, found = false;
  for (const auto& k : criteria()) {
    if (only != 0 && k.id != only) continue;
    found = true;
    ok = report(k) && ok;
  }
  if (!found) {
    std::cerr << "no criterion " << only << "\n";
    return 2;
  }
  return ok ? 0 : 1;
}
