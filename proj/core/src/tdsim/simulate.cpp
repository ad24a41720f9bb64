#include "vessel/tdsim/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tdsim/network.hpp"
#include "vessel/error.hpp"
#include "vessel/powerflow/ac.hpp"

namespace vessel::tdsim {
namespace {

constexpr double kSpeedLimit = 0.5;  // pu deviation treated as divergence

struct Machine {
  std::size_t gen;  // index into grid.generators
  std::string id;
  std::string bus;
  std::size_t node = 0;
  cplx y;  // 1 / (j X'd), system pu
  double s_kva, p_rated_kw;
  double h, damping, droop, tg, ka, ta;
  double e0, vref, pref;
};

struct FixedSource {
  std::string id;
  std::string bus;
  std::size_t node = 0;
  cplx v;
};

struct PqElement {
  std::string id;
  std::string bus;
  std::size_t node = 0;
  cplx s0;             // pu, consumption positive
  bool load = true;    // false: inverter injection
  double scale = 1.0;  // ramp state, loads only
  double ramp_t0 = 0.0, ramp_t1 = 0.0, ramp_s0 = 1.0, ramp_s1 = 1.0;

  double scale_at(double t) const {
    if (t >= ramp_t1) return ramp_s1;
    if (t <= ramp_t0) return ramp_s0;
    return ramp_s0 + (ramp_s1 - ramp_s0) * (t - ramp_t0) / (ramp_t1 - ramp_t0);
  }
};

struct Controller {
  ControllerConfig cfg;
  std::size_t element;  // index into pq_
  ControllerState state;
  Setpoint out;
  bool connected = true;
  std::optional<double> pending_loss;
};

struct Solved {
  std::vector<cplx> v;
  std::vector<double> pe;  // kW per machine
  std::vector<double> qe;
};

class Simulator {
 public:
  Simulator(const grid::GridModel& grid, const EventSchedule& schedule, const std::vector<ControllerConfig>& ctrls,
            const SimConfig& cfg)
      : g_(grid), schedule_(schedule), cfg_(cfg) {
    cfg.validate();
    schedule.validate(grid);
    init(ctrls);
  }

  TimeSeries run() {
    const auto steps = static_cast<std::size_t>(std::llround(cfg_.end / cfg_.step));
    std::size_t next_event = 0;
    double t = 0.0;
    apply_events_until(t, next_event);
    record(t);
    update_controllers(t);
    for (std::size_t k = 1; k <= steps && !ts_.stopped_early; ++k) {
      const double target = static_cast<double>(k) * cfg_.step;
      full_solve_ = cfg_.network_interval <= 1 || k % static_cast<std::size_t>(cfg_.network_interval) == 0;
      while (next_event < schedule_.events.size() && schedule_.events[next_event].time < target - 1e-12) {
        const double te = schedule_.events[next_event].time;
        if (te > t) integrate(t, te);
        t = std::max(t, te);
        apply_events_until(t, next_event);
      }
      integrate(t, target);
      t = target;
      apply_events_until(t, next_event);
      full_solve_ = true;
      record(t);
      update_controllers(t);
    }
    return std::move(ts_);
  }

 private:
  // ---- setup ---------------------------------------------------------------
  void init(const std::vector<ControllerConfig>& ctrls) {
    powerflow::PowerflowOptions pf_opt;
    pf_opt.slack = cfg_.slack;
    auto sol = powerflow::solve_ac_powerflow(g_, pf_opt);
    base_kva_ = g_.base_mva * 1000.0;
    auto bus_v = [&](const std::string& bus) {
      const auto* b = sol.find_bus(bus);
      return b && b->energized ? std::polar(b->v_pu, b->angle) : cplx(0.0);
    };

    for (std::size_t k = 0; k < g_.generators.size(); ++k) {
      const auto& gen = g_.generators[k];
      const auto* res = sol.find_element(gen.id);
      if (!gen.online || !res || !res->online) continue;
      if (gen.infinite) {
        fixed_.push_back({gen.id, gen.bus, 0, bus_v(gen.bus)});
        continue;
      }
      if (!gen.dynamics) throw InputError("online generator '" + gen.id + "' has no dynamics block");
      const auto& d = *gen.dynamics;
      if (!(d.inertia_h > 0.0)) throw InputError("generator '" + gen.id + "' needs inertia_h > 0");
      const double v_nom = g_.bus(gen.bus).nominal_voltage;
      const double x = d.xd_t * base_kva_ / gen.rated_kva * std::pow(gen.voltage / v_nom, 2);
      Machine m{k, gen.id, gen.bus, 0, 1.0 / cplx(0.0, x), gen.rated_kva, gen.rated_kw,
                d.inertia_h, d.damping, d.governor_droop, d.governor_t, d.avr_gain, d.avr_t, 0, 0, 0};
      const cplx v = bus_v(gen.bus);
      const cplx s(res->p_kw / base_kva_, res->q_kvar / base_kva_);
      const cplx e = v + cplx(0.0, x) * std::conj(s / v);
      m.e0 = std::abs(e);
      m.vref = std::abs(v);
      m.pref = res->p_kw;
      machines_.push_back(m);
      x_.insert(x_.end(), {std::arg(e), 0.0, res->p_kw, m.e0});
    }
    for (const auto& id : sol.slack_elements) {
      if (const auto* c = g_.find_converter(id)) fixed_.push_back({c->id, c->ac_bus, 0, bus_v(c->ac_bus)});
    }
    for (const auto& l : g_.loads) {
      PqElement e;
      e.id = l.id;
      e.bus = l.bus;
      e.s0 = cplx(l.p_kw(), l.q_kvar()) / base_kva_;
      pq_.push_back(e);
    }
    for (const auto& c : g_.converters) {
      if (c.ac_bus.empty() || is_fixed(c.id)) continue;
      PqElement e;
      e.id = c.id;
      e.bus = c.ac_bus;
      e.load = c.kind == grid::ConverterKind::Charger;
      if (e.load) {
        auto it = sol.dc_transfer_kw.find(c.id);
        e.s0 = cplx(it != sol.dc_transfer_kw.end() ? it->second : 0.0, 0.0) / base_kva_;
      } else if (!c.dc_bus.empty()) {
        e.s0 = -cplx(c.p_setpoint_kw, c.q_setpoint_kvar) / base_kva_;
      } else {
        continue;  // drive: its load carries the power
      }
      pq_.push_back(e);
    }
    for (const auto& cc : ctrls) {
      cc.validate();
      auto it = std::find_if(pq_.begin(), pq_.end(), [&](const PqElement& e) { return e.id == cc.inverter && !e.load; });
      if (it == pq_.end()) throw InputError("controller '" + cc.id + "': '" + cc.inverter + "' is not an inverter");
      for (const auto& w : cc.watched) {
        if (!g_.find_generator(w)) throw InputError("controller '" + cc.id + "' watches unknown generator '" + w + "'");
      }
      for (const auto& other : controllers_) {
        if (other.cfg.inverter == cc.inverter) throw InputError("two controllers drive inverter '" + cc.inverter + "'");
      }
      controllers_.push_back({cc, static_cast<std::size_t>(it - pq_.begin()), ControllerState(cc.dp_delay), {}, true, {}});
    }
    rebuild();
    v_.assign(net_->size(), cplx(1.0));
    for (std::size_t i = 0; i < g_.buses.size(); ++i) {
      const auto* b = sol.find_bus(g_.buses[i].id);
      if (b && b->energized && g_.buses[i].kind == grid::BusKind::AC) v_[net_->pu().map.node_of_bus[i]] = bus_v(b->bus);
    }
    for (auto& c : controllers_) c.connected = watched_connected(c);
    channels();
  }

  bool is_fixed(const std::string& id) const {
    return std::any_of(fixed_.begin(), fixed_.end(), [&](const FixedSource& f) { return f.id == id; });
  }

  void rebuild() {
    FaultState* f = fault_ ? &*fault_ : nullptr;
    net_.emplace(g_, f);
    for (auto& m : machines_) m.node = net_->node(g_, m.bus);
    for (auto& s : fixed_) s.node = net_->node(g_, s.bus);
    for (auto& e : pq_) e.node = net_->node(g_, e.bus);
  }

  // ---- channels ------------------------------------------------------------
  void channels() {
    auto add = [&](std::string name) {
      ts_.names.push_back(std::move(name));
      ts_.data.emplace_back();
    };
    for (const auto& m : machines_) {
      for (const char* q : {".p_kw", ".q_kvar", ".pm_kw", ".angle_rad", ".speed_pu", ".e_pu"}) add(m.id + q);
    }
    for (const auto& s : fixed_) {
      for (const char* q : {".p_kw", ".q_kvar", ".angle_rad"}) add(s.id + q);
    }
    for (const auto& e : pq_) {
      add(e.id + ".p_kw");
      if (!e.load) add(e.id + ".q_kvar");
    }
    for (const auto& b : g_.buses) {
      if (b.kind == grid::BusKind::AC) add(b.id + ".v_pu");
    }
    for (const char* n : {"network.losses_kw", "network.residual_kw", "system.freq_hz"}) add(n);
  }

  // ---- network evaluation --------------------------------------------------
  std::vector<PowerElement> elements(double t) const {
    std::vector<PowerElement> out;
    out.reserve(pq_.size());
    for (std::size_t i = 0; i < pq_.size(); ++i) {
      const auto& e = pq_[i];
      out.push_back({e.node, e.load ? e.s0 * e.scale_at(t) : injection(i)});
    }
    return out;
  }

  cplx injection(std::size_t element) const {
    for (const auto& c : controllers_) {
      if (c.element == element) return -cplx(c.out.p_kw, c.out.q_kvar) / base_kva_;
    }
    return pq_[element].s0;
  }

  Solved solve(double t, const std::vector<double>& x) {
    std::vector<NortonSource> src;
    src.reserve(machines_.size());
    for (std::size_t i = 0; i < machines_.size(); ++i) {
      src.push_back({machines_[i].node, machines_[i].y, std::polar(x[4 * i + 3], x[4 * i])});
    }
    std::vector<FixedVoltage> fixed;
    for (const auto& s : fixed_) fixed.push_back({s.node, s.v});
    Solved r;
    r.v = v_;
    net_->solve(src, fixed, elements(t), r.v, cfg_.network_tol, full_solve_ ? cfg_.network_max_iter : 1);
    v_ = r.v;
    for (std::size_t i = 0; i < machines_.size(); ++i) {
      const cplx e = src[i].e;
      const cplx cur = (e - r.v[src[i].node]) * src[i].y;
      r.pe.push_back((e * std::conj(cur)).real() * base_kva_);
      r.qe.push_back((r.v[src[i].node] * std::conj(cur)).imag() * base_kva_);
    }
    return r;
  }

  std::vector<double> derivative(double t, const std::vector<double>& x) {
    auto r = solve(t, x);
    std::vector<double> dx(x.size(), 0.0);
    for (std::size_t i = 0; i < machines_.size(); ++i) {
      const auto& m = machines_[i];
      const double ws = 2.0 * grid::kPi * g_.generators[m.gen].frequency;
      const double dw = x[4 * i + 1];
      const double pm = x[4 * i + 2];
      const double e = x[4 * i + 3];
      dx[4 * i] = ws * dw;
      dx[4 * i + 1] = ((pm - r.pe[i]) / m.s_kva - m.damping * dw) / (2.0 * m.h);
      if (m.droop > 0.0) dx[4 * i + 2] = (m.pref - dw / m.droop * m.p_rated_kw - pm) / m.tg;
      if (m.ka > 0.0) dx[4 * i + 3] = (m.e0 + m.ka * (m.vref - std::abs(r.v[m.node])) - e) / m.ta;
    }
    return dx;
  }

  void integrate(double t0, double t1) {
    const double h = t1 - t0;
    if (!(h > 0.0)) return;
    auto axpy = [](const std::vector<double>& a, double s, const std::vector<double>& b) {
      std::vector<double> out(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + s * b[i];
      return out;
    };
    if (cfg_.integrator == Integrator::Rk4) {
      auto k1 = derivative(t0, x_);
      auto k2 = derivative(t0 + h / 2, axpy(x_, h / 2, k1));
      auto k3 = derivative(t0 + h / 2, axpy(x_, h / 2, k2));
      auto k4 = derivative(t1, axpy(x_, h, k3));
      for (std::size_t i = 0; i < x_.size(); ++i) x_[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    } else {
      auto k1 = derivative(t0, x_);
      auto k2 = derivative(t1, axpy(x_, h, k1));
      for (std::size_t i = 0; i < x_.size(); ++i) x_[i] += h / 2.0 * (k1[i] + k2[i]);
    }
    for (std::size_t i = 0; i < machines_.size(); ++i) {
      if (!std::isfinite(x_[4 * i]) || std::abs(x_[4 * i + 1]) > kSpeedLimit) {
        if (cfg_.stop_angle > 0.0) {
          ts_.stopped_early = true;
          ts_.max_angle_separation = std::max(ts_.max_angle_separation, cfg_.stop_angle + 1.0);
          return;
        }
        throw NumericalError("integration diverged: machine '" + machines_[i].id + "' speed out of bounds");
      }
    }
  }

  // ---- events --------------------------------------------------------------
  void apply_events_until(double t, std::size_t& next) {
    bool topology = false;
    while (next < schedule_.events.size() && schedule_.events[next].time <= t + 1e-12) {
      const auto& e = schedule_.events[next++];
      switch (e.action) {
        case Action::LoadStep: {
          for (auto& p : pq_) {
            if (p.id != e.target || !p.load) continue;
            p.ramp_s0 = p.scale_at(e.time);
            p.ramp_s1 = e.scale;
            p.ramp_t0 = e.time;
            p.ramp_t1 = e.time + e.ramp;
          }
          break;
        }
        case Action::BreakerOpen:
        case Action::BreakerClose:
          g_.find_breaker(e.target)->state =
              e.action == Action::BreakerOpen ? grid::SwitchState::Open : grid::SwitchState::Closed;
          topology = true;
          break;
        case Action::FaultApply: {
          FaultState f;
          if (g_.find_bus(e.target)) {
            f.bus = e.target;
          } else {
            for (std::size_t k = 0; k < g_.branches.size(); ++k) {
              if (g_.branches[k].id == e.target) f.branch = k;
            }
            f.location = e.location;
          }
          fault_ = f;
          topology = true;
          break;
        }
        case Action::FaultClear:
          fault_.reset();
          topology = true;
          break;
      }
      if (topology) {
        rebuild();
        topology = false;
        for (auto& c : controllers_) {
          if (c.cfg.mode != ControllerMode::DpFailover) continue;
          bool now = watched_connected(c);
          if (c.connected && !now) c.pending_loss = e.time;
          if (!c.connected && now) {
            c.state.reset();
            c.out = {};
          }
          c.connected = now;
        }
      }
    }
  }

  bool watched_connected(const Controller& c) const {
    const auto& isl = net_->island();
    const std::size_t inv = isl[pq_[c.element].node];
    for (const auto& w : c.cfg.watched) {
      const auto* gen = g_.find_generator(w);
      if (!gen->online) return false;
      if (isl[net_->node(g_, gen->bus)] != inv) return false;
    }
    return true;
  }

  // ---- output --------------------------------------------------------------
  void record(double t) {
    auto r = solve(t, x_);
    last_ = r;
    std::size_t col = 0;
    auto put = [&](double v) { ts_.data[col++].push_back(v); };
    ts_.t.push_back(t);

    const auto cur = net_->network_currents(r.v);
    std::vector<cplx> element_i(net_->size(), 0.0);  // consumption current per node
    auto elems = elements(t);
    for (const auto& e : elems) element_i[e.node] += element_current(e.s, r.v[e.node]);
    std::vector<cplx> machine_i(net_->size(), 0.0);
    double sources = 0.0;
    double h_total = 0.0, h_speed = 0.0;
    std::map<std::size_t, std::pair<double, double>> island_angles;
    auto angle = [&](std::size_t node, double a) {
      auto [it, fresh] = island_angles.try_emplace(net_->island()[node], a, a);
      if (!fresh) it->second = {std::min(it->second.first, a), std::max(it->second.second, a)};
    };
    for (std::size_t i = 0; i < machines_.size(); ++i) {
      const auto& m = machines_[i];
      const cplx e = std::polar(x_[4 * i + 3], x_[4 * i]);
      machine_i[m.node] += (e - r.v[m.node]) * m.y;
      put(r.pe[i]);
      put(r.qe[i]);
      put(x_[4 * i + 2]);
      put(x_[4 * i]);
      put(1.0 + x_[4 * i + 1]);
      put(x_[4 * i + 3]);
      sources += r.pe[i];
      h_total += m.h * m.s_kva;
      h_speed += m.h * m.s_kva * (1.0 + x_[4 * i + 1]);
      angle(m.node, x_[4 * i]);
    }
    for (const auto& s : fixed_) {
      const cplx i_src = cur[s.node] + element_i[s.node] - machine_i[s.node];
      const cplx sp = r.v[s.node] * std::conj(i_src) * base_kva_;
      put(sp.real());
      put(sp.imag());
      put(std::arg(s.v));
      sources += sp.real();
      angle(s.node, std::arg(s.v));
    }
    double loads = 0.0;
    for (std::size_t i = 0; i < pq_.size(); ++i) {
      const cplx sp = r.v[elems[i].node] * std::conj(element_current(elems[i].s, r.v[elems[i].node])) * base_kva_;
      if (pq_[i].load) {
        put(sp.real());
        loads += sp.real();
      } else {
        put(-sp.real());
        put(-sp.imag());
        sources -= sp.real();
      }
    }
    for (std::size_t i = 0; i < g_.buses.size(); ++i) {
      if (g_.buses[i].kind == grid::BusKind::AC) put(std::abs(r.v[net_->pu().map.node_of_bus[i]]));
    }
    const double losses = net_->losses(r.v) * base_kva_;
    put(losses);
    put(sources - loads - losses);
    const double f0 = machines_.empty() ? g_.buses.front().frequency : g_.generators[machines_.front().gen].frequency;
    put(h_total > 0.0 ? f0 * h_speed / h_total : f0);

    for (const auto& [isl, range] : island_angles) {
      ts_.max_angle_separation = std::max(ts_.max_angle_separation, range.second - range.first);
    }
    if (cfg_.stop_angle > 0.0 && ts_.max_angle_separation > cfg_.stop_angle) ts_.stopped_early = true;
  }

  void update_controllers(double t) {
    for (auto& c : controllers_) {
      double p = 0.0, q = 0.0;
      for (const auto& w : c.cfg.watched) {
        for (std::size_t i = 0; i < machines_.size(); ++i) {
          if (machines_[i].id == w) {
            p += last_.pe[i];
            q += last_.qe[i];
          }
        }
      }
      if (c.cfg.mode == ControllerMode::PeakShave) {
        // Threshold the demand the generators would carry without the inverter.
        ControllerConfig per_island = c.cfg;
        const auto n = static_cast<double>(c.cfg.watched.size());
        per_island.p_threshold_kw *= n;
        per_island.q_threshold_kvar *= n;
        c.out = peak_shave_setpoint(per_island, p + c.out.p_kw, q + c.out.q_kvar);
      } else {
        c.state.record(t, p, q);
        c.out = dp_failover_setpoint(c.state, c.cfg, c.pending_loss);
        c.pending_loss.reset();
      }
    }
  }

  grid::GridModel g_;
  const EventSchedule& schedule_;
  SimConfig cfg_;
  double base_kva_ = 1000.0;
  std::vector<Machine> machines_;
  std::vector<FixedSource> fixed_;
  std::vector<PqElement> pq_;
  std::vector<Controller> controllers_;
  std::optional<FaultState> fault_;
  std::optional<Network> net_;
  std::vector<double> x_;
  std::vector<cplx> v_;
  Solved last_;
  bool full_solve_ = true;
  TimeSeries ts_;
};

}  // namespace

void SimConfig::validate() const {
  if (!(step > 0.0)) throw InputError("sim step must be > 0");
  if (!(end > step)) throw InputError("sim end must exceed the step");
  if (network_interval < 1) throw InputError("network_interval must be >= 1");
  if (!(network_tol > 0.0) || network_max_iter < 1) throw InputError("network tolerance/iterations must be positive");
}

bool TimeSeries::has(const std::string& name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

const std::vector<double>& TimeSeries::channel(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw InputError("no channel '" + name + "'");
  return data[static_cast<std::size_t>(it - names.begin())];
}

TimeSeries simulate(const grid::GridModel& grid, const EventSchedule& schedule,
                    const std::vector<ControllerConfig>& controllers, const SimConfig& cfg) {
  return Simulator(grid, schedule, controllers, cfg).run();
}

}  // namespace vessel::tdsim
