#include "tdsim/network.hpp"

#include <cmath>
#include <numeric>

#include "vessel/error.hpp"

namespace vessel::tdsim {

cplx element_current(cplx s, cplx v) {
  const double vm = std::abs(v);
  if (vm >= kConstantPowerMinVoltage) return std::conj(s / v);
  // Impedance that draws `s` at the threshold voltage.
  return std::conj(s) / (kConstantPowerMinVoltage * kConstantPowerMinVoltage) * v;
}

Network::Network(const grid::GridModel& grid, const FaultState* fault) : net_(powerflow::build_pu_network(grid)) {
  const auto n = static_cast<Eigen::Index>(size());
  ynet_ = Eigen::MatrixXcd::Zero(n, n);
  std::vector<std::size_t> parent(size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& b : net_.branches) {
    const auto f = static_cast<Eigen::Index>(b.from);
    const auto t = static_cast<Eigen::Index>(b.to);
    if (fault && fault->branch && *fault->branch == b.element) {
      const double loc = fault->location;
      if (loc <= 0.0) {
        fault_node_ = b.from;
      } else if (loc >= 1.0) {
        fault_node_ = b.to;
      } else {
        // Both segments end on the grounded fault point.
        ynet_(f, f) += b.y / loc;
        ynet_(t, t) += b.y / (1.0 - loc);
        continue;
      }
    }
    ynet_(f, f) += b.y;
    ynet_(t, t) += b.y;
    ynet_(f, t) -= b.y;
    ynet_(t, f) -= b.y;
    parent[find(b.from)] = find(b.to);
  }
  if (fault && !fault->bus.empty()) fault_node_ = net_.node(grid, fault->bus);
  island_.resize(size());
  for (std::size_t i = 0; i < size(); ++i) island_[i] = find(i);
}

void Network::factor(const std::vector<NortonSource>& machines, const std::vector<FixedVoltage>& fixed) {
  std::vector<std::size_t> key;
  for (const auto& m : machines) key.push_back(m.node);
  key.push_back(static_cast<std::size_t>(-1));
  for (const auto& f : fixed) key.push_back(f.node);
  if (key == key_ && !unknown_.empty()) return;
  key_ = key;

  std::vector<bool> is_fixed(size(), false), live_island(size(), false);
  for (const auto& f : fixed) {
    if (fault_node_ && f.node == *fault_node_) throw InputError("bolted fault on a fixed-voltage source node");
    is_fixed[f.node] = true;
    live_island[island_[f.node]] = true;
  }
  if (fault_node_) {
    is_fixed[*fault_node_] = true;
    live_island[island_[*fault_node_]] = true;
  }
  for (const auto& m : machines) live_island[island_[m.node]] = true;
  // A branch-fault shunt alone does not energize an island.
  dead_.assign(size(), false);
  unknown_.assign(size(), -1);
  unknown_nodes_.clear();
  fixed_nodes_.clear();
  for (std::size_t i = 0; i < size(); ++i) {
    if (net_.node_dc[i]) {
      dead_[i] = true;
      continue;
    }
    if (!live_island[island_[i]]) {
      dead_[i] = true;
    } else if (is_fixed[i]) {
      fixed_nodes_.push_back(i);
    } else {
      unknown_[i] = static_cast<Eigen::Index>(unknown_nodes_.size());
      unknown_nodes_.push_back(i);
    }
  }
  const auto nu = static_cast<Eigen::Index>(unknown_nodes_.size());
  const auto nd = static_cast<Eigen::Index>(fixed_nodes_.size());
  Eigen::MatrixXcd yuu(nu, nu);
  y_ud_.resize(nu, nd);
  for (Eigen::Index r = 0; r < nu; ++r) {
    const auto i = static_cast<Eigen::Index>(unknown_nodes_[r]);
    for (Eigen::Index c = 0; c < nu; ++c) yuu(r, c) = ynet_(i, static_cast<Eigen::Index>(unknown_nodes_[c]));
    for (Eigen::Index c = 0; c < nd; ++c) y_ud_(r, c) = ynet_(i, static_cast<Eigen::Index>(fixed_nodes_[c]));
  }
  for (const auto& m : machines) {
    if (unknown_[m.node] >= 0) yuu(unknown_[m.node], unknown_[m.node]) += m.y;
  }
  if (nu > 0) {
    lu_.compute(yuu);
    if (!std::isfinite(std::abs(lu_.determinant())) || std::abs(lu_.determinant()) == 0.0) {
      throw NumericalError("network admittance matrix is singular");
    }
  }
}

void Network::solve(const std::vector<NortonSource>& machines, const std::vector<FixedVoltage>& fixed,
                    const std::vector<PowerElement>& elements, std::vector<cplx>& v, double tol, int max_iter) {
  factor(machines, fixed);
  v.resize(size(), cplx(1.0, 0.0));
  std::vector<cplx> fixed_v(size(), cplx(0.0));
  for (const auto& f : fixed) fixed_v[f.node] = f.v;
  for (std::size_t i = 0; i < size(); ++i) {
    if (dead_[i]) v[i] = 0.0;
  }
  for (std::size_t n : fixed_nodes_) v[n] = fixed_v[n];

  const auto nu = static_cast<Eigen::Index>(unknown_nodes_.size());
  if (nu == 0) return;
  Eigen::VectorXcd vd(static_cast<Eigen::Index>(fixed_nodes_.size()));
  for (std::size_t c = 0; c < fixed_nodes_.size(); ++c) vd(static_cast<Eigen::Index>(c)) = v[fixed_nodes_[c]];
  Eigen::VectorXcd base = -(y_ud_ * vd);
  for (const auto& m : machines) {
    if (unknown_[m.node] >= 0) base(unknown_[m.node]) += m.e * m.y;
  }

  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXcd rhs = base;
    for (const auto& e : elements) {
      if (unknown_[e.node] >= 0) rhs(unknown_[e.node]) -= element_current(e.s, v[e.node]);
    }
    Eigen::VectorXcd x = lu_.solve(rhs);
    double change = 0.0;
    for (Eigen::Index r = 0; r < nu; ++r) {
      const std::size_t node = unknown_nodes_[r];
      change = std::max(change, std::abs(x(r) - v[node]));
      v[node] = x(r);
    }
    if (!std::isfinite(change)) throw NumericalError("network solve produced non-finite voltages");
    if (change <= tol || max_iter == 1) return;
  }
  throw NumericalError("network solve did not converge in " + std::to_string(max_iter) + " sweeps");
}

std::vector<cplx> Network::network_currents(const std::vector<cplx>& v) const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::VectorXcd vv(n);
  for (Eigen::Index i = 0; i < n; ++i) vv(i) = v[static_cast<std::size_t>(i)];
  Eigen::VectorXcd i = ynet_ * vv;
  return {i.data(), i.data() + n};
}

double Network::losses(const std::vector<cplx>& v) const {
  auto cur = network_currents(v);
  double p = 0.0;
  for (std::size_t i = 0; i < size(); ++i) p += (v[i] * std::conj(cur[i])).real();
  return p;
}

}  // namespace vessel::tdsim
