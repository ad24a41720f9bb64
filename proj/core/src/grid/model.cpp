#include "vessel/grid/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vessel/error.hpp"

namespace vessel::grid {
namespace {

template <typename T>
auto find_by_id(T& items, std::string_view id) -> decltype(&items.front()) {
  auto it = std::find_if(items.begin(), items.end(), [&](const auto& x) { return x.id == id; });
  return it == items.end() ? nullptr : &*it;
}

}  // namespace

double LoadSpec::p_kw() const { return rated_kva * power_factor * demand_factor; }

double LoadSpec::q_kvar() const {
  double sin_phi = std::sqrt(std::max(0.0, 1.0 - power_factor * power_factor));
  return rated_kva * sin_phi * demand_factor;
}

const Bus* GridModel::find_bus(std::string_view id) const { return find_by_id(buses, id); }
const BranchSpec* GridModel::find_branch(std::string_view id) const { return find_by_id(branches, id); }
const GeneratorSpec* GridModel::find_generator(std::string_view id) const { return find_by_id(generators, id); }
const BatterySource* GridModel::find_battery(std::string_view id) const { return find_by_id(batteries, id); }
const ConverterSpec* GridModel::find_converter(std::string_view id) const { return find_by_id(converters, id); }
const LoadSpec* GridModel::find_load(std::string_view id) const { return find_by_id(loads, id); }
const BreakerSpec* GridModel::find_breaker(std::string_view id) const { return find_by_id(breakers, id); }
const FuseSpec* GridModel::find_fuse(std::string_view id) const { return find_by_id(fuses, id); }

GeneratorSpec* GridModel::find_generator(std::string_view id) { return find_by_id(generators, id); }
LoadSpec* GridModel::find_load(std::string_view id) { return find_by_id(loads, id); }
BreakerSpec* GridModel::find_breaker(std::string_view id) { return find_by_id(breakers, id); }
ConverterSpec* GridModel::find_converter(std::string_view id) { return find_by_id(converters, id); }

const Bus& GridModel::bus(std::string_view id) const {
  const Bus* b = find_bus(id);
  if (!b) throw InputError("dangling reference to bus '" + std::string(id) + "'");
  return *b;
}

bool GridModel::has_element(std::string_view id) const {
  if (find_bus(id) || find_branch(id) || find_generator(id) || find_battery(id) ||
      find_converter(id) || find_load(id) || find_breaker(id) || find_fuse(id)) {
    return true;
  }
  return std::any_of(converters.begin(), converters.end(),
                     [&](const ConverterSpec& c) { return c.dc_link && c.dc_link->id == id; });
}

std::string_view to_string(BusKind k) { return k == BusKind::AC ? "ac" : "dc"; }

std::string_view to_string(BranchKind k) { return k == BranchKind::Cable ? "cable" : "transformer"; }

std::string_view to_string(ConverterKind k) {
  switch (k) {
    case ConverterKind::Inverter: return "inverter";
    case ConverterKind::Charger: return "charger";
    case ConverterKind::DcDc: return "dcdc";
    case ConverterKind::GridInverter: return "grid_inverter";
  }
  return "inverter";
}

std::string_view to_string(LongTimeKind k) { return k == LongTimeKind::Definite ? "definite" : "inverse"; }

std::string_view to_string(SwitchState s) { return s == SwitchState::Closed ? "closed" : "open"; }

}  // namespace vessel::grid
