#include "vessel/powerflow/ac.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "powerflow/network_model.hpp"
#include "vessel/error.hpp"
#include "vessel/powerflow/dc_balance.hpp"

namespace vessel::powerflow {
namespace {

enum class NodeType { PQ, PV, Slack };

bool grid_forming_candidate(const grid::ConverterSpec& c) {
  return !c.ac_bus.empty() && !c.dc_bus.empty() &&
         (c.kind == grid::ConverterKind::Inverter || c.kind == grid::ConverterKind::GridInverter);
}

struct IslandResult {
  std::vector<std::size_t> nodes;
  Eigen::VectorXcd v;
  Eigen::VectorXcd s;  // pu injection computed from the solution
  int iterations = 0;
  double mismatch = 0.0;
};

// Polar Newton-Raphson on one island. `p`, `q` are specified net injections
// (pu); entries of the slack node are ignored, `q` is ignored on PV nodes.
IslandResult newton_raphson(const PuNetwork& net, const std::vector<std::size_t>& nodes,
                            const std::vector<NodeType>& type, const std::vector<double>& vset,
                            const std::vector<double>& p, const std::vector<double>& q,
                            const PowerflowOptions& opt) {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  std::vector<Eigen::Index> local(net.map.node_count, -1);
  for (Eigen::Index i = 0; i < n; ++i) local[nodes[i]] = i;

  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& b : net.branches) {
    Eigen::Index f = local[b.from];
    Eigen::Index t = local[b.to];
    if (f < 0 || t < 0) continue;
    y(f, f) += b.y;
    y(t, t) += b.y;
    y(f, t) -= b.y;
    y(t, f) -= b.y;
  }
  const Eigen::MatrixXd G = y.real();
  const Eigen::MatrixXd B = y.imag();

  Eigen::VectorXd vm(n);
  Eigen::VectorXd va = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Index> ang_idx;  // unknown angles
  std::vector<Eigen::Index> mag_idx;  // unknown magnitudes
  for (Eigen::Index i = 0; i < n; ++i) {
    vm(i) = type[i] == NodeType::PQ ? 1.0 : vset[i];
    if (type[i] != NodeType::Slack) ang_idx.push_back(i);
    if (type[i] == NodeType::PQ) mag_idx.push_back(i);
  }
  const auto na = static_cast<Eigen::Index>(ang_idx.size());
  const auto nm = static_cast<Eigen::Index>(mag_idx.size());

  auto injections = [&](Eigen::VectorXd& pc, Eigen::VectorXd& qc) {
    pc.setZero(n);
    qc.setZero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < n; ++k) {
        if (G(i, k) == 0.0 && B(i, k) == 0.0) continue;
        const double th = va(i) - va(k);
        pc(i) += vm(i) * vm(k) * (G(i, k) * std::cos(th) + B(i, k) * std::sin(th));
        qc(i) += vm(i) * vm(k) * (G(i, k) * std::sin(th) - B(i, k) * std::cos(th));
      }
    }
  };

  IslandResult res;
  res.nodes = nodes;
  Eigen::VectorXd pc, qc;
  Eigen::VectorXd f(na + nm);
  for (int iter = 0;; ++iter) {
    injections(pc, qc);
    for (Eigen::Index a = 0; a < na; ++a) f(a) = p[ang_idx[a]] - pc(ang_idx[a]);
    for (Eigen::Index m = 0; m < nm; ++m) f(na + m) = q[mag_idx[m]] - qc(mag_idx[m]);
    res.mismatch = f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
    if (!std::isfinite(res.mismatch)) throw NumericalError("power flow diverged (non-finite mismatch)");
    if (res.mismatch <= opt.tol) {
      res.iterations = iter;
      break;
    }
    if (iter >= opt.max_iter) {
      throw NumericalError("power flow did not converge in " + std::to_string(opt.max_iter) +
                           " iterations (mismatch " + std::to_string(res.mismatch) + " pu)");
    }
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(na + nm, na + nm);
    auto dpdth = [&](Eigen::Index i, Eigen::Index k) {
      if (i == k) return -qc(i) - B(i, i) * vm(i) * vm(i);
      const double th = va(i) - va(k);
      return vm(i) * vm(k) * (G(i, k) * std::sin(th) - B(i, k) * std::cos(th));
    };
    auto dpdv = [&](Eigen::Index i, Eigen::Index k) {
      if (i == k) return pc(i) / vm(i) + G(i, i) * vm(i);
      const double th = va(i) - va(k);
      return vm(i) * (G(i, k) * std::cos(th) + B(i, k) * std::sin(th));
    };
    auto dqdth = [&](Eigen::Index i, Eigen::Index k) {
      if (i == k) return pc(i) - G(i, i) * vm(i) * vm(i);
      const double th = va(i) - va(k);
      return -vm(i) * vm(k) * (G(i, k) * std::cos(th) + B(i, k) * std::sin(th));
    };
    auto dqdv = [&](Eigen::Index i, Eigen::Index k) {
      if (i == k) return qc(i) / vm(i) - B(i, i) * vm(i);
      const double th = va(i) - va(k);
      return vm(i) * (G(i, k) * std::sin(th) - B(i, k) * std::cos(th));
    };
    for (Eigen::Index r = 0; r < na; ++r) {
      for (Eigen::Index c = 0; c < na; ++c) J(r, c) = dpdth(ang_idx[r], ang_idx[c]);
      for (Eigen::Index c = 0; c < nm; ++c) J(r, na + c) = dpdv(ang_idx[r], mag_idx[c]);
    }
    for (Eigen::Index r = 0; r < nm; ++r) {
      for (Eigen::Index c = 0; c < na; ++c) J(na + r, c) = dqdth(mag_idx[r], ang_idx[c]);
      for (Eigen::Index c = 0; c < nm; ++c) J(na + r, na + c) = dqdv(mag_idx[r], mag_idx[c]);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
    Eigen::VectorXd dx = lu.solve(f);
    if (!dx.allFinite()) throw NumericalError("power flow Jacobian is singular");
    for (Eigen::Index a = 0; a < na; ++a) va(ang_idx[a]) += dx(a);
    for (Eigen::Index m = 0; m < nm; ++m) vm(mag_idx[m]) += dx(na + m);
    if ((vm.array() <= 0.0).any() || (vm.array() > 10.0).any()) {
      throw NumericalError("power flow diverged (voltage magnitude out of range)");
    }
  }
  res.v.resize(n);
  res.s.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    res.v(i) = std::polar(vm(i), va(i));
    res.s(i) = cplx(pc(i), qc(i));
  }
  return res;
}

// Voltage-controlling source at a node: a generator or a grid-forming converter.
struct Source {
  enum class Kind { Generator, Converter } kind;
  std::size_t index;
  double weight_kva;
  double p_kw = 0.0;  // specified (non-slack) or solved
  double q_kvar = 0.0;
  bool slack = false;
};

class Solver {
 public:
  Solver(const grid::GridModel& g, const PowerflowOptions& opt) : g_(g), opt_(opt), net_(build_pu_network(g)) {}

  PowerflowSolution run() {
    std::vector<std::vector<std::size_t>> islands(net_.island_count);
    for (std::size_t n = 0; n < net_.map.node_count; ++n) {
      if (!net_.node_dc[n]) islands[net_.island[n]].push_back(n);
    }
    // Converter-fed islands first: their outputs set the DC demand that the
    // chargers of the machine islands must then pick up.
    std::vector<std::size_t> order_gen, order_conv;
    for (std::size_t i = 0; i < islands.size(); ++i) {
      if (islands[i].empty()) continue;
      (has_online_generator(islands[i]) ? order_gen : order_conv).push_back(i);
    }
    for (std::size_t i : order_conv) solve_island(islands[i]);

    std::map<std::string, double> inverter_out;
    for (const auto& c : g_.converters) {
      if (!grid_forming_candidate(c)) continue;
      auto it = converter_p_.find(c.id);
      inverter_out[c.id] = it != converter_p_.end() ? it->second : c.p_setpoint_kw;
    }
    bool any_dc = std::any_of(g_.buses.begin(), g_.buses.end(),
                              [](const grid::Bus& b) { return b.kind == grid::BusKind::DC; });
    if (any_dc) dc_ = solve_dc_balance(g_, inverter_out);
    for (std::size_t i : order_gen) solve_island(islands[i]);
    return assemble();
  }

 private:
  bool has_online_generator(const std::vector<std::size_t>& nodes) const {
    for (const auto& gen : g_.generators) {
      if (gen.online && contains(nodes, net_.node(g_, gen.bus))) return true;
    }
    return false;
  }
  static bool contains(const std::vector<std::size_t>& v, std::size_t x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  }

  void solve_island(const std::vector<std::size_t>& nodes) {
    const double base = net_.kva_base();
    std::vector<Source> sources;
    for (std::size_t k = 0; k < g_.generators.size(); ++k) {
      const auto& gen = g_.generators[k];
      if (gen.online && contains(nodes, net_.node(g_, gen.bus))) {
        sources.push_back({Source::Kind::Generator, k, gen.rated_kva});
      }
    }
    // Without machines the largest grid-forming converter holds the voltage.
    std::string forming;
    if (sources.empty()) {
      for (std::size_t k = 0; k < g_.converters.size(); ++k) {
        const auto& c = g_.converters[k];
        if (!grid_forming_candidate(c) || !contains(nodes, net_.node(g_, c.ac_bus))) continue;
        if (sources.empty() || c.rated_kw > sources.front().weight_kva) {
          sources.assign(1, {Source::Kind::Converter, k, c.rated_kw});
          forming = c.id;
        }
      }
    }

    // Fixed injections and loads, kW/kvar per node.
    std::vector<double> p(net_.map.node_count, 0.0), q(net_.map.node_count, 0.0);
    double load_total = 0.0;
    bool any_load = false;
    for (const auto& l : g_.loads) {
      std::size_t n = net_.node(g_, l.bus);
      if (!contains(nodes, n)) continue;
      p[n] -= l.p_kw();
      q[n] -= l.q_kvar();
      load_total += l.p_kw();
      any_load = any_load || l.p_kw() != 0.0 || l.q_kvar() != 0.0;
    }
    for (const auto& c : g_.converters) {
      if (c.ac_bus.empty()) continue;
      std::size_t n = net_.node(g_, c.ac_bus);
      if (!contains(nodes, n)) continue;
      double pc = 0.0, qc = 0.0;
      if (c.kind == grid::ConverterKind::Charger) {
        auto it = dc_.transferred_kw.find(c.id);
        pc = it != dc_.transferred_kw.end() ? -it->second : 0.0;
      } else if (grid_forming_candidate(c) && c.id != forming) {
        pc = c.p_setpoint_kw;
        qc = c.q_setpoint_kvar;
      }
      p[n] += pc;
      q[n] += qc;
      load_total -= pc;
      any_load = any_load || pc != 0.0 || qc != 0.0;
      fixed_[c.id] = {pc, qc};
    }

    if (sources.empty()) {
      if (any_load) {
        throw InputError("AC island with bus '" + bus_of_node(nodes.front()) + "' has load but no slack source");
      }
      for (std::size_t n : nodes) energized_[n] = false;
      return;
    }

    // Slack choice: override, infinite bus, largest rating.
    std::size_t slack = 0;
    bool found = false;
    for (std::size_t i = 0; i < sources.size(); ++i) {
      if (sources[i].kind == Source::Kind::Generator && opt_.slack && g_.generators[sources[i].index].id == *opt_.slack) {
        slack = i;
        found = true;
      }
    }
    if (!found) {
      for (std::size_t i = 0; i < sources.size() && !found; ++i) {
        if (sources[i].kind == Source::Kind::Generator && g_.generators[sources[i].index].infinite) {
          slack = i;
          found = true;
        }
      }
    }
    if (!found) {
      for (std::size_t i = 1; i < sources.size(); ++i) {
        if (sources[i].weight_kva > sources[slack].weight_kva) slack = i;
      }
    }
    sources[slack].slack = true;

    // Non-slack generators: setpoint, else a share of the island load by rated kW.
    double rated_total = 0.0;
    for (const auto& s : sources) rated_total += rated_kw(s);
    for (auto& s : sources) {
      if (s.slack) continue;
      const auto& gen = g_.generators[s.index];
      s.p_kw = gen.p_setpoint_kw ? *gen.p_setpoint_kw : load_total * rated_kw(s) / rated_total;
      p[node_of(s)] += s.p_kw;
    }

    std::vector<NodeType> type(nodes.size(), NodeType::PQ);
    std::vector<double> vset(nodes.size(), 1.0), pl(nodes.size()), ql(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      pl[i] = p[nodes[i]] / base;
      ql[i] = q[nodes[i]] / base;
    }
    for (const auto& s : sources) {
      std::size_t li = std::find(nodes.begin(), nodes.end(), node_of(s)) - nodes.begin();
      if (s.slack) {
        type[li] = NodeType::Slack;
        vset[li] = v_setpoint(s);
      } else if (type[li] != NodeType::Slack && s.kind == Source::Kind::Generator) {
        if (type[li] == NodeType::PQ) vset[li] = v_setpoint(s);
        type[li] = NodeType::PV;
      }
    }

    auto res = newton_raphson(net_, nodes, type, vset, pl, ql, opt_);
    iterations_ = std::max(iterations_, res.iterations);
    mismatch_ = std::max(mismatch_, res.mismatch);

    for (std::size_t i = 0; i < nodes.size(); ++i) {
      std::size_t n = nodes[i];
      voltage_[n] = res.v(static_cast<Eigen::Index>(i));
      energized_[n] = true;
      const double pc = res.s(static_cast<Eigen::Index>(i)).real() * base;
      const double qc = res.s(static_cast<Eigen::Index>(i)).imag() * base;
      // Source outputs at this node: computed injection minus everything else there.
      double p_other = p[n], q_other = q[n];
      double kva_here = 0.0;
      for (const auto& s : sources) {
        if (node_of(s) != n) continue;
        if (!s.slack) p_other -= s.p_kw;
        if (type[i] != NodeType::PQ) kva_here += s.weight_kva;
      }
      for (auto& s : sources) {
        if (node_of(s) != n) continue;
        if (s.slack) s.p_kw = pc - p_other;
        if (kva_here > 0.0) s.q_kvar = (qc - q_other) * s.weight_kva / kva_here;
      }
    }
    for (const auto& s : sources) {
      if (s.kind == Source::Kind::Generator) {
        source_pq_[g_.generators[s.index].id] = {s.p_kw, s.q_kvar};
        if (s.slack) slack_ids_.push_back(g_.generators[s.index].id);
      } else {
        const auto& c = g_.converters[s.index];
        converter_p_[c.id] = s.p_kw;
        fixed_[c.id] = {s.p_kw, s.q_kvar};
        if (s.slack) slack_ids_.push_back(c.id);
      }
    }
  }

  double rated_kw(const Source& s) const {
    return s.kind == Source::Kind::Generator ? g_.generators[s.index].rated_kw : g_.converters[s.index].rated_kw;
  }
  double v_setpoint(const Source& s) const {
    return s.kind == Source::Kind::Generator ? g_.generators[s.index].v_setpoint_pu : 1.0;
  }
  std::size_t node_of(const Source& s) const {
    return net_.node(g_, s.kind == Source::Kind::Generator ? g_.generators[s.index].bus : g_.converters[s.index].ac_bus);
  }
  std::string bus_of_node(std::size_t n) const {
    for (std::size_t i = 0; i < g_.buses.size(); ++i) {
      if (net_.map.node_of_bus[i] == n) return g_.buses[i].id;
    }
    return "?";
  }

  PowerflowSolution assemble() {
    PowerflowSolution sol;
    sol.base_mva = g_.base_mva;
    sol.iterations = iterations_;
    sol.max_mismatch = mismatch_;
    sol.slack_elements = slack_ids_;
    sol.dc_transfer_kw = dc_.transferred_kw;

    std::map<std::string, std::pair<double, double>> bus_pq;
    auto element = [&](const std::string& id, const std::string& bus, double p, double q, bool online) {
      sol.elements.push_back({id, bus, p, q, online});
      bus_pq[bus].first += p;
      bus_pq[bus].second += q;
    };
    for (const auto& gen : g_.generators) {
      auto it = source_pq_.find(gen.id);
      if (it != source_pq_.end()) element(gen.id, gen.bus, it->second.first, it->second.second, true);
      else sol.elements.push_back({gen.id, gen.bus, 0.0, 0.0, false});
    }
    for (const auto& l : g_.loads) {
      bool on = energized_.count(net_.node(g_, l.bus)) && energized_[net_.node(g_, l.bus)];
      element(l.id, l.bus, on ? -l.p_kw() : 0.0, on ? -l.q_kvar() : 0.0, on);
    }
    for (const auto& c : g_.converters) {
      auto it = fixed_.find(c.id);
      const std::string& bus = c.ac_bus.empty() ? c.dc_bus : c.ac_bus;
      if (it != fixed_.end()) element(c.id, bus, it->second.first, it->second.second, true);
      else sol.elements.push_back({c.id, bus, 0.0, 0.0, false});
    }
    for (const auto& b : g_.batteries) {
      auto it = dc_.source_kw.find(b.id);
      sol.elements.push_back({b.id, b.bus, it != dc_.source_kw.end() ? it->second : 0.0, 0.0, true});
    }

    double gen = 0.0;
    for (std::size_t i = 0; i < g_.buses.size(); ++i) {
      const auto& b = g_.buses[i];
      std::size_t n = net_.map.node_of_bus[i];
      BusResult r;
      r.bus = b.id;
      if (b.kind == grid::BusKind::DC) {
        r.v_pu = 1.0;
        r.energized = true;
      } else if (energized_.count(n) && energized_[n]) {
        r.v_pu = std::abs(voltage_[n]);
        r.angle = std::arg(voltage_[n]);
        r.energized = true;
      }
      auto it = bus_pq.find(b.id);
      if (it != bus_pq.end() && b.kind == grid::BusKind::AC) {
        r.p_kw = it->second.first;
        r.q_kvar = it->second.second;
        gen += r.p_kw;
      }
      sol.buses.push_back(r);
    }
    sol.losses_kw = gen;
    return sol;
  }

  const grid::GridModel& g_;
  PowerflowOptions opt_;
  PuNetwork net_;
  DcBalanceSolution dc_;
  std::map<std::size_t, cplx> voltage_;
  std::map<std::size_t, bool> energized_;
  std::map<std::string, std::pair<double, double>> source_pq_;
  std::map<std::string, std::pair<double, double>> fixed_;
  std::map<std::string, double> converter_p_;
  std::vector<std::string> slack_ids_;
  int iterations_ = 0;
  double mismatch_ = 0.0;
};

}  // namespace

const BusResult* PowerflowSolution::find_bus(const std::string& id) const {
  for (const auto& b : buses) {
    if (b.bus == id) return &b;
  }
  return nullptr;
}

const ElementResult* PowerflowSolution::find_element(const std::string& id) const {
  for (const auto& e : elements) {
    if (e.element == id) return &e;
  }
  return nullptr;
}

PowerflowSolution solve_ac_powerflow(const grid::GridModel& grid, const PowerflowOptions& options) {
  if (!(options.tol > 0.0) || options.max_iter < 0) throw InputError("power flow needs tol > 0 and max_iter >= 0");
  return Solver(grid, options).run();
}

}  // namespace vessel::powerflow
