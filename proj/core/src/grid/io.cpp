#include "vessel/grid/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "util/format.hpp"
#include "vessel/error.hpp"
#include "vessel/grid/fixtures.hpp"
#include "vessel/grid/validate.hpp"
#include "vessel/sc/ac.hpp"

namespace vessel::grid {
namespace {

enum class Dim { None, PerUnit, Voltage, Current, Kva, Kw, Kvar, Kwh, Ohm, Time, Farad, Henry, Hertz, I2t };

struct Suffix {
  std::string_view text;
  Dim dim;
  double divisor;  // stored = value * multiplier / divisor
  double multiplier;
};

constexpr Suffix kSuffixes[] = {
    {"v", Dim::Voltage, 1, 1},       {"kv", Dim::Voltage, 1, 1000},
    {"a", Dim::Current, 1, 1},       {"ka", Dim::Current, 1, 1000},
    {"kva", Dim::Kva, 1, 1},         {"mva", Dim::Kva, 1, 1000},
    {"kw", Dim::Kw, 1, 1},           {"mw", Dim::Kw, 1, 1000},
    {"w", Dim::Kw, 1000, 1},         {"kvar", Dim::Kvar, 1, 1},
    {"mvar", Dim::Kvar, 1, 1000},    {"kwh", Dim::Kwh, 1, 1},
    {"mwh", Dim::Kwh, 1, 1000},      {"ohm", Dim::Ohm, 1, 1},
    {"mohm", Dim::Ohm, 1e3, 1},      {"uohm", Dim::Ohm, 1e6, 1},
    {"s", Dim::Time, 1, 1},          {"ms", Dim::Time, 1e3, 1},
    {"us", Dim::Time, 1e6, 1},       {"f", Dim::Farad, 1, 1},
    {"mf", Dim::Farad, 1e3, 1},      {"uf", Dim::Farad, 1e6, 1},
    {"h", Dim::Henry, 1, 1},         {"mh", Dim::Henry, 1e3, 1},
    {"uh", Dim::Henry, 1e6, 1},      {"hz", Dim::Hertz, 1, 1},
    {"a2s", Dim::I2t, 1, 1},         {"pu", Dim::PerUnit, 1, 1},
};

std::string_view canonical_suffix(Dim d) {
  switch (d) {
    case Dim::None: return "";
    case Dim::PerUnit: return "pu";
    case Dim::Voltage: return "v";
    case Dim::Current: return "a";
    case Dim::Kva: return "kva";
    case Dim::Kw: return "kw";
    case Dim::Kvar: return "kvar";
    case Dim::Kwh: return "kwh";
    case Dim::Ohm: return "ohm";
    case Dim::Time: return "s";
    case Dim::Farad: return "f";
    case Dim::Henry: return "h";
    case Dim::Hertz: return "hz";
    case Dim::I2t: return "a2s";
  }
  return "";
}

struct SplitKey {
  std::string base;
  Dim dim = Dim::None;
  const Suffix* suffix = nullptr;
};

SplitKey split_key(std::string_view key) {
  auto us = key.rfind('_');
  if (us != std::string_view::npos && us > 0) {
    std::string_view tail = key.substr(us + 1);
    for (const auto& s : kSuffixes) {
      if (s.text == tail) return SplitKey{std::string(key.substr(0, us)), s.dim, &s};
    }
  }
  return SplitKey{std::string(key), Dim::None, nullptr};
}

double parse_double(const Entry& e) {
  double v = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  if (*first == '+') ++first;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ParseError("expected a number for '" + e.key + "', got '" + e.value + "'", e.line, e.column);
  }
  return v;
}

int parse_int(const Entry& e) {
  int v = 0;
  auto res = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (res.ec != std::errc() || res.ptr != e.value.data() + e.value.size()) {
    throw ParseError("expected an integer for '" + e.key + "'", e.line, e.column);
  }
  return v;
}

bool parse_bool(const Entry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  throw ParseError("expected true/false for '" + e.key + "'", e.line, e.column);
}

std::string parse_id(const Entry& e) {
  for (char c : e.value) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#')) {
      throw ParseError("invalid id '" + e.value + "' for '" + e.key + "'", e.line, e.column);
    }
  }
  return e.value;
}

template <typename E>
E parse_enum(const Entry& e, std::initializer_list<std::pair<std::string_view, E>> options) {
  for (const auto& [name, value] : options) {
    if (e.value == name) return value;
  }
  std::string allowed;
  for (const auto& [name, value] : options) allowed += (allowed.empty() ? "" : "|") + std::string(name);
  throw ParseError("'" + e.key + "' must be one of " + allowed + ", got '" + e.value + "'", e.line, e.column);
}

std::string fmt_num(double v) { return util::shortest_min2(v); }
std::string fmt_bool(bool b) { return b ? "true" : "false"; }

/// Field descriptor: how one key is read into T and written back.
template <typename T>
struct Field {
  std::string base;
  Dim dim = Dim::None;
  bool required = false;
  std::function<void(T&, const Entry&, double)> set;  // numeric value already in stored units
  std::function<void(T&, const Entry&)> set_text;
  std::function<std::optional<std::string>(const T&)> get;

  bool numeric() const { return static_cast<bool>(set); }
  std::string key() const {
    auto s = canonical_suffix(dim);
    return s.empty() ? base : base + "_" + std::string(s);
  }
};

template <typename T>
Field<T> num(std::string base, Dim dim, double T::*member, bool required = false) {
  Field<T> f;
  f.base = std::move(base);
  f.dim = dim;
  f.required = required;
  f.set = [member](T& t, const Entry&, double v) { t.*member = v; };
  f.get = [member](const T& t) -> std::optional<std::string> { return fmt_num(t.*member); };
  return f;
}

template <typename T>
Field<T> opt_num(std::string base, Dim dim, std::optional<double> T::*member) {
  Field<T> f;
  f.base = std::move(base);
  f.dim = dim;
  f.set = [member](T& t, const Entry&, double v) { t.*member = v; };
  f.get = [member](const T& t) -> std::optional<std::string> {
    if (!(t.*member)) return std::nullopt;
    return fmt_num(*(t.*member));
  };
  return f;
}

template <typename T>
Field<T> flag(std::string base, bool T::*member) {
  Field<T> f;
  f.base = std::move(base);
  f.set_text = [member](T& t, const Entry& e) { t.*member = parse_bool(e); };
  f.get = [member](const T& t) -> std::optional<std::string> { return fmt_bool(t.*member); };
  return f;
}

template <typename T>
Field<T> ref(std::string base, std::string T::*member, bool required = false) {
  Field<T> f;
  f.base = std::move(base);
  f.required = required;
  f.set_text = [member](T& t, const Entry& e) { t.*member = parse_id(e); };
  f.get = [member](const T& t) -> std::optional<std::string> {
    if ((t.*member).empty()) return std::nullopt;
    return t.*member;
  };
  return f;
}

template <typename T>
Field<T> custom(std::string base, Dim dim, std::function<void(T&, const Entry&, double)> set,
                std::function<std::optional<std::string>(const T&)> get, bool required = false) {
  Field<T> f;
  f.base = std::move(base);
  f.dim = dim;
  f.required = required;
  f.set = std::move(set);
  f.get = std::move(get);
  return f;
}

template <typename T>
Field<T> text(std::string base, std::function<void(T&, const Entry&)> set,
              std::function<std::optional<std::string>(const T&)> get, bool required = false) {
  Field<T> f;
  f.base = std::move(base);
  f.required = required;
  f.set_text = std::move(set);
  f.get = std::move(get);
  return f;
}

// ---- per-kind tables --------------------------------------------------------

struct GridHeader {
  GridModel* grid;
};

struct DynamicsInput {
  GeneratorDynamicParams params;
  std::optional<double> td_t;
  std::optional<double> td_st;
  bool has_td0_t = false;
  bool has_td0_st = false;
};

struct CapacitorInput {
  CapacitorBranch cap;
  std::string converter;
};

const std::vector<Field<Bus>>& bus_fields() {
  static const std::vector<Field<Bus>> fields = {
      text<Bus>("kind", [](Bus& b, const Entry& e) { b.kind = parse_enum<BusKind>(e, {{"ac", BusKind::AC}, {"dc", BusKind::DC}}); },
                [](const Bus& b) -> std::optional<std::string> { return std::string(to_string(b.kind)); }, true),
      num<Bus>("voltage", Dim::Voltage, &Bus::nominal_voltage, true),
      custom<Bus>("frequency", Dim::Hertz, [](Bus& b, const Entry&, double v) { b.frequency = v; },
                  [](const Bus& b) -> std::optional<std::string> {
                    if (b.kind == BusKind::DC) return std::nullopt;
                    return fmt_num(b.frequency);
                  }),
  };
  return fields;
}

const std::vector<Field<BranchSpec>>& branch_fields() {
  static const std::vector<Field<BranchSpec>> fields = {
      ref<BranchSpec>("from", &BranchSpec::from, true),
      ref<BranchSpec>("to", &BranchSpec::to, true),
      text<BranchSpec>("kind",
                       [](BranchSpec& b, const Entry& e) {
                         b.kind = parse_enum<BranchKind>(e, {{"cable", BranchKind::Cable}, {"transformer", BranchKind::Transformer}});
                       },
                       [](const BranchSpec& b) -> std::optional<std::string> { return std::string(to_string(b.kind)); }),
      num<BranchSpec>("resistance", Dim::Ohm, &BranchSpec::resistance),
      num<BranchSpec>("reactance", Dim::Ohm, &BranchSpec::reactance),
      num<BranchSpec>("rated", Dim::Kva, &BranchSpec::rated_kva),
      flag<BranchSpec>("synthetic", &BranchSpec::synthetic),
  };
  return fields;
}

const std::vector<Field<GeneratorSpec>>& generator_fields() {
  static const std::vector<Field<GeneratorSpec>> fields = {
      ref<GeneratorSpec>("bus", &GeneratorSpec::bus, true),
      num<GeneratorSpec>("rated", Dim::Kva, &GeneratorSpec::rated_kva, true),
      num<GeneratorSpec>("rated", Dim::Kw, &GeneratorSpec::rated_kw),
      num<GeneratorSpec>("voltage", Dim::Voltage, &GeneratorSpec::voltage),
      num<GeneratorSpec>("current", Dim::Current, &GeneratorSpec::rated_current),
      num<GeneratorSpec>("frequency", Dim::Hertz, &GeneratorSpec::frequency),
      num<GeneratorSpec>("pf", Dim::None, &GeneratorSpec::power_factor, true),
      num<GeneratorSpec>("rpm", Dim::None, &GeneratorSpec::speed_rpm),
      custom<GeneratorSpec>("poles", Dim::None,
                            [](GeneratorSpec& g, const Entry& e, double) { g.poles = parse_int(e); },
                            [](const GeneratorSpec& g) -> std::optional<std::string> {
                              if (!g.poles) return std::nullopt;
                              return std::to_string(*g.poles);
                            }),
      num<GeneratorSpec>("winding_resistance", Dim::Ohm, &GeneratorSpec::winding_resistance),
      flag<GeneratorSpec>("online", &GeneratorSpec::online),
      flag<GeneratorSpec>("infinite", &GeneratorSpec::infinite),
      opt_num<GeneratorSpec>("p_setpoint", Dim::Kw, &GeneratorSpec::p_setpoint_kw),
      num<GeneratorSpec>("v_setpoint", Dim::PerUnit, &GeneratorSpec::v_setpoint_pu),
  };
  return fields;
}

const std::vector<Field<DynamicsInput>>& dynamics_fields() {
  using D = DynamicsInput;
  auto p = [](double GeneratorDynamicParams::*m, std::string base, Dim dim) {
    return custom<D>(std::move(base), dim, [m](D& d, const Entry&, double v) { d.params.*m = v; },
                     [m](const D& d) -> std::optional<std::string> { return fmt_num(d.params.*m); });
  };
  static const std::vector<Field<D>> fields = {
      p(&GeneratorDynamicParams::xd, "xd", Dim::PerUnit),
      p(&GeneratorDynamicParams::xd_t, "xd_t", Dim::PerUnit),
      p(&GeneratorDynamicParams::xd_st, "xd_st", Dim::PerUnit),
      custom<D>("td0_t", Dim::Time, [](D& d, const Entry&, double v) { d.params.td0_t = v; d.has_td0_t = true; },
                [](const D& d) -> std::optional<std::string> { return fmt_num(d.params.td0_t); }),
      custom<D>("td0_st", Dim::Time, [](D& d, const Entry&, double v) { d.params.td0_st = v; d.has_td0_st = true; },
                [](const D& d) -> std::optional<std::string> { return fmt_num(d.params.td0_st); }),
      custom<D>("td_t", Dim::Time, [](D& d, const Entry&, double v) { d.td_t = v; },
                [](const D&) -> std::optional<std::string> { return std::nullopt; }),
      custom<D>("td_st", Dim::Time, [](D& d, const Entry&, double v) { d.td_st = v; },
                [](const D&) -> std::optional<std::string> { return std::nullopt; }),
      custom<D>("tdc", Dim::Time, [](D& d, const Entry&, double v) { d.params.tdc = v; },
                [](const D& d) -> std::optional<std::string> {
                  if (!d.params.tdc) return std::nullopt;
                  return fmt_num(*d.params.tdc);
                }),
      custom<D>("ikd", Dim::Current, [](D& d, const Entry&, double v) { d.params.ikd = v; },
                [](const D& d) -> std::optional<std::string> {
                  if (!d.params.ikd) return std::nullopt;
                  return fmt_num(*d.params.ikd);
                }),
      p(&GeneratorDynamicParams::inertia_h, "inertia_h", Dim::Time),
      p(&GeneratorDynamicParams::damping, "damping", Dim::PerUnit),
      p(&GeneratorDynamicParams::governor_droop, "gov_droop", Dim::PerUnit),
      p(&GeneratorDynamicParams::governor_t, "gov_t", Dim::Time),
      p(&GeneratorDynamicParams::avr_gain, "avr_gain", Dim::PerUnit),
      p(&GeneratorDynamicParams::avr_t, "avr_t", Dim::Time),
      text<D>("synthetic", [](D& d, const Entry& e) { d.params.synthetic = parse_bool(e); },
              [](const D& d) -> std::optional<std::string> { return fmt_bool(d.params.synthetic); }),
  };
  return fields;
}

const std::vector<Field<BatterySource>>& battery_fields() {
  static const std::vector<Field<BatterySource>> fields = {
      ref<BatterySource>("bus", &BatterySource::bus, true),
      num<BatterySource>("capacity", Dim::Kwh, &BatterySource::capacity_kwh),
      num<BatterySource>("sc_peak_current", Dim::Current, &BatterySource::sc_peak_current, true),
      num<BatterySource>("sc_time_constant", Dim::Time, &BatterySource::sc_time_constant, true),
      num<BatterySource>("min_soc", Dim::None, &BatterySource::min_soc),
      num<BatterySource>("soc", Dim::None, &BatterySource::soc),
  };
  return fields;
}

const std::vector<Field<ConverterSpec>>& converter_fields() {
  static const std::vector<Field<ConverterSpec>> fields = {
      text<ConverterSpec>("kind",
                          [](ConverterSpec& c, const Entry& e) {
                            c.kind = parse_enum<ConverterKind>(e, {{"inverter", ConverterKind::Inverter},
                                                                   {"charger", ConverterKind::Charger},
                                                                   {"dcdc", ConverterKind::DcDc},
                                                                   {"grid_inverter", ConverterKind::GridInverter}});
                          },
                          [](const ConverterSpec& c) -> std::optional<std::string> { return std::string(to_string(c.kind)); },
                          true),
      ref<ConverterSpec>("ac_bus", &ConverterSpec::ac_bus),
      ref<ConverterSpec>("dc_bus", &ConverterSpec::dc_bus),
      num<ConverterSpec>("rated_current", Dim::Current, &ConverterSpec::rated_current, true),
      num<ConverterSpec>("rated", Dim::Kw, &ConverterSpec::rated_kw),
      num<ConverterSpec>("sc_factor", Dim::None, &ConverterSpec::sc_contribution_factor),
      num<ConverterSpec>("efficiency", Dim::None, &ConverterSpec::efficiency),
      num<ConverterSpec>("p_setpoint", Dim::Kw, &ConverterSpec::p_setpoint_kw),
      num<ConverterSpec>("q_setpoint", Dim::Kvar, &ConverterSpec::q_setpoint_kvar),
  };
  return fields;
}

const std::vector<Field<CapacitorInput>>& capacitor_fields() {
  using C = CapacitorInput;
  auto p = [](double CapacitorBranch::*m, std::string base, Dim dim) {
    return custom<C>(std::move(base), dim, [m](C& c, const Entry&, double v) { c.cap.*m = v; },
                     [m](const C& c) -> std::optional<std::string> { return fmt_num(c.cap.*m); }, true);
  };
  static const std::vector<Field<C>> fields = {
      ref<C>("converter", &C::converter, true),
      p(&CapacitorBranch::capacitance, "capacitance", Dim::Farad),
      p(&CapacitorBranch::series_resistance, "resistance", Dim::Ohm),
      p(&CapacitorBranch::series_inductance, "inductance", Dim::Henry),
      p(&CapacitorBranch::initial_voltage, "initial_voltage", Dim::Voltage),
      text<C>("enabled", [](C& c, const Entry& e) { c.cap.enabled = parse_bool(e); },
              [](const C& c) -> std::optional<std::string> { return fmt_bool(c.cap.enabled); }),
  };
  return fields;
}

const std::vector<Field<LoadSpec>>& load_fields() {
  static const std::vector<Field<LoadSpec>> fields = {
      ref<LoadSpec>("bus", &LoadSpec::bus, true),
      num<LoadSpec>("rated", Dim::Kva, &LoadSpec::rated_kva, true),
      num<LoadSpec>("pf", Dim::None, &LoadSpec::power_factor, true),
      num<LoadSpec>("static_fraction", Dim::None, &LoadSpec::static_fraction),
      num<LoadSpec>("motor_fraction", Dim::None, &LoadSpec::motor_fraction),
      num<LoadSpec>("locked_rotor_multiplier", Dim::None, &LoadSpec::locked_rotor_multiplier),
      opt_num<LoadSpec>("xr_ratio", Dim::None, &LoadSpec::xr_ratio),
      num<LoadSpec>("motor_t_ac", Dim::Time, &LoadSpec::motor_t_ac),
      num<LoadSpec>("demand_factor", Dim::None, &LoadSpec::demand_factor),
      ref<LoadSpec>("converter", &LoadSpec::converter),
  };
  return fields;
}

const std::vector<Field<BreakerSpec>>& breaker_fields() {
  using B = BreakerSpec;
  auto tcc_num = [](std::function<double&(B&)> at, std::string base, Dim dim, bool required) {
    return custom<B>(std::move(base), dim, [at](B& b, const Entry&, double v) { at(b) = v; },
                     [at](const B& b) -> std::optional<std::string> { B copy = b; return fmt_num(at(copy)); },
                     required);
  };
  static const std::vector<Field<B>> fields = {
      ref<B>("from", &B::from, true),
      ref<B>("to", &B::to, true),
      flag<B>("directional", &B::directional),
      text<B>("state",
              [](B& b, const Entry& e) {
                b.state = parse_enum<SwitchState>(e, {{"open", SwitchState::Open}, {"closed", SwitchState::Closed}});
              },
              [](const B& b) -> std::optional<std::string> { return std::string(to_string(b.state)); }),
      tcc_num([](B& b) -> double& { return b.tcc.long_time.pickup; }, "lt_pickup", Dim::Current, true),
      text<B>("lt_kind",
              [](B& b, const Entry& e) {
                b.tcc.long_time.kind =
                    parse_enum<LongTimeKind>(e, {{"definite", LongTimeKind::Definite}, {"inverse", LongTimeKind::Inverse}});
              },
              [](const B& b) -> std::optional<std::string> { return std::string(to_string(b.tcc.long_time.kind)); }),
      tcc_num([](B& b) -> double& { return b.tcc.long_time.delay; }, "lt_delay", Dim::Time, true),
      tcc_num([](B& b) -> double& { return b.tcc.short_time.pickup; }, "st_pickup", Dim::Current, true),
      tcc_num([](B& b) -> double& { return b.tcc.short_time.delay; }, "st_delay", Dim::Time, true),
      text<B>("st_directional", [](B& b, const Entry& e) { b.tcc.short_time.directional = parse_bool(e); },
              [](const B& b) -> std::optional<std::string> { return fmt_bool(b.tcc.short_time.directional); }),
      tcc_num([](B& b) -> double& { return b.tcc.zsi_extended_delay; }, "zsi_delay", Dim::Time, false),
  };
  return fields;
}

const std::vector<Field<FuseSpec>>& fuse_fields() {
  static const std::vector<Field<FuseSpec>> fields = {
      ref<FuseSpec>("element", &FuseSpec::element, true),
      num<FuseSpec>("i2t", Dim::I2t, &FuseSpec::i2t_total_clearing, true),
      opt_num<FuseSpec>("rated_current", Dim::Current, &FuseSpec::rated_current),
  };
  return fields;
}

const std::vector<Field<GridHeader>>& grid_fields() {
  static const std::vector<Field<GridHeader>> fields = {
      custom<GridHeader>("base", Dim::Kva, [](GridHeader& h, const Entry&, double v) { h.grid->base_mva = v / 1000.0; },
                         [](const GridHeader& h) -> std::optional<std::string> { return fmt_num(h.grid->base_mva * 1000.0); }),
  };
  return fields;
}

template <typename T>
void apply_entries(T& target, const Section& section, const std::vector<Field<T>>& fields, bool check_required) {
  std::vector<bool> seen(fields.size(), false);
  for (const auto& entry : section.entries) {
    SplitKey sk = split_key(entry.key);
    const Field<T>* match = nullptr;
    std::size_t match_index = 0;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto& f = fields[i];
      bool hit = (f.base == sk.base && f.dim == sk.dim && sk.dim != Dim::None) ||
                 (f.base == entry.key && (f.dim == Dim::None || f.dim == Dim::PerUnit));
      if (hit) {
        match = &f;
        match_index = i;
        break;
      }
    }
    if (!match) {
      throw ParseError("unknown key '" + entry.key + "' in [" + section.kind + " " + section.id + "]", entry.line,
                       entry.column);
    }
    if (seen[match_index]) {
      throw ParseError("key '" + entry.key + "' given twice (different units)", entry.line, entry.column);
    }
    seen[match_index] = true;
    if (match->numeric()) {
      double v = parse_double(entry);
      if (match->base == entry.key || !sk.suffix) {
        match->set(target, entry, v);
      } else {
        match->set(target, entry, v * sk.suffix->multiplier / sk.suffix->divisor);
      }
    } else {
      match->set_text(target, entry);
    }
  }
  if (check_required) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (fields[i].required && !seen[i]) {
        throw InputError("missing required key '" + fields[i].key() + "' in [" + section.kind + " " + section.id +
                         "] (line " + std::to_string(section.line) + ")");
      }
    }
  }
}

template <typename T>
void emit_section(std::ostringstream& out, std::string_view kind, const std::string& id, const T& target,
                  const std::vector<Field<T>>& fields) {
  std::map<std::string, std::string> kv;
  for (const auto& f : fields) {
    if (auto v = f.get(target)) kv[f.key()] = *v;
  }
  out << '[' << kind << ' ' << id << "]\n";
  for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
  out << '\n';
}

void check_bus_ref(const GridModel& g, const std::string& owner, const std::string& key, const std::string& bus) {
  if (bus.empty()) return;
  if (!g.find_bus(bus)) {
    throw InputError("dangling reference: " + owner + " " + key + " = '" + bus + "' is not a declared bus");
  }
}

void check_references(const GridModel& g) {
  for (const auto& b : g.branches) {
    check_bus_ref(g, "[branch " + b.id + "]", "from", b.from);
    check_bus_ref(g, "[branch " + b.id + "]", "to", b.to);
  }
  for (const auto& x : g.generators) check_bus_ref(g, "[generator " + x.id + "]", "bus", x.bus);
  for (const auto& x : g.batteries) check_bus_ref(g, "[battery " + x.id + "]", "bus", x.bus);
  for (const auto& x : g.converters) {
    check_bus_ref(g, "[converter " + x.id + "]", "ac_bus", x.ac_bus);
    check_bus_ref(g, "[converter " + x.id + "]", "dc_bus", x.dc_bus);
  }
  for (const auto& x : g.loads) {
    check_bus_ref(g, "[load " + x.id + "]", "bus", x.bus);
    if (!x.converter.empty() && !g.find_converter(x.converter)) {
      throw InputError("dangling reference: [load " + x.id + "] converter = '" + x.converter + "'");
    }
  }
  for (const auto& x : g.breakers) {
    check_bus_ref(g, "[breaker " + x.id + "]", "from", x.from);
    check_bus_ref(g, "[breaker " + x.id + "]", "to", x.to);
  }
  for (const auto& x : g.fuses) {
    if (!g.has_element(x.element)) {
      throw InputError("dangling reference: [fuse " + x.id + "] element = '" + x.element + "'");
    }
  }
}

void finish_generator(GeneratorSpec& g, const GridModel& grid) {
  const Bus* bus = grid.find_bus(g.bus);
  if (g.voltage == 0.0 && bus) g.voltage = bus->nominal_voltage;
  if (g.frequency == 0.0 && bus) g.frequency = bus->frequency;
  if (g.rated_kw == 0.0) g.rated_kw = g.rated_kva * g.power_factor;
  if (g.rated_current == 0.0 && g.voltage > 0.0) g.rated_current = g.rated_kva * 1000.0 / (kSqrt3 * g.voltage);
}

GeneratorDynamicParams finish_dynamics(const DynamicsInput& in, const Section& s) {
  GeneratorDynamicParams p = in.params;
  if (in.td_t || in.td_st) {
    if (in.has_td0_t || in.has_td0_st) {
      throw InputError("[dynamics " + s.id + "] gives both open-circuit and short-circuit time constants");
    }
    if (!in.td_t || !in.td_st) {
      throw InputError("[dynamics " + s.id + "] needs both td_t and td_st");
    }
    auto oc = sc::convert_time_constants(p.xd, p.xd_t, p.xd_st, *in.td_t, *in.td_st);
    p.td0_t = oc.td0_t;
    p.td0_st = oc.td0_st;
  } else if (!in.has_td0_t || !in.has_td0_st) {
    throw InputError("[dynamics " + s.id + "] needs td0_t/td0_st or td_t/td_st");
  }
  return p;
}

// Resolves the element carrying `id` and applies entries with the matching table.
void modify_element(GridModel& g, const Section& s, bool check_required) {
  const std::string& id = s.id;
  auto apply_found = [&](auto& items, const auto& fields) -> bool {
    for (auto& item : items) {
      if (item.id == id) {
        apply_entries(item, s, fields, check_required);
        return true;
      }
    }
    return false;
  };
  if (apply_found(g.buses, bus_fields())) return;
  if (apply_found(g.branches, branch_fields())) return;
  if (apply_found(g.generators, generator_fields())) return;
  if (apply_found(g.batteries, battery_fields())) return;
  if (apply_found(g.converters, converter_fields())) return;
  if (apply_found(g.loads, load_fields())) return;
  if (apply_found(g.breakers, breaker_fields())) return;
  if (apply_found(g.fuses, fuse_fields())) return;
  for (auto& c : g.converters) {
    if (c.dc_link && c.dc_link->id == id) {
      CapacitorInput in{*c.dc_link, c.id};
      apply_entries(in, s, capacitor_fields(), false);
      if (in.converter != c.id) throw InputError("[modify " + id + "] cannot move a capacitor to another converter");
      c.dc_link = in.cap;
      return;
    }
  }
  throw InputError("dangling reference: no element with id '" + id + "' to modify");
}

}  // namespace

GridModel parse_grid(std::string_view text, const ParseOptions& options) {
  GridModel g;
  auto sections = read_sections(text);
  std::vector<std::pair<std::string, GeneratorDynamicParams>> dynamics;
  std::vector<CapacitorInput> capacitors;
  bool saw_grid = false;

  for (const auto& s : sections) {
    if (s.id.empty()) throw ParseError("section needs an id", s.line, 2);
    if (s.kind == "grid") {
      if (saw_grid) throw ParseError("more than one [grid] section", s.line, 1);
      saw_grid = true;
      g.name = s.id;
      GridHeader h{&g};
      apply_entries(h, s, grid_fields(), true);
    } else if (s.kind == "bus") {
      Bus b;
      b.id = s.id;
      apply_entries(b, s, bus_fields(), true);
      g.buses.push_back(std::move(b));
    } else if (s.kind == "branch") {
      BranchSpec b;
      b.id = s.id;
      apply_entries(b, s, branch_fields(), true);
      g.branches.push_back(std::move(b));
    } else if (s.kind == "generator") {
      GeneratorSpec x;
      x.id = s.id;
      apply_entries(x, s, generator_fields(), true);
      g.generators.push_back(std::move(x));
    } else if (s.kind == "dynamics") {
      DynamicsInput in;
      apply_entries(in, s, dynamics_fields(), false);
      dynamics.emplace_back(s.id, finish_dynamics(in, s));
    } else if (s.kind == "battery") {
      BatterySource x;
      x.id = s.id;
      apply_entries(x, s, battery_fields(), true);
      g.batteries.push_back(std::move(x));
    } else if (s.kind == "converter") {
      ConverterSpec x;
      x.id = s.id;
      apply_entries(x, s, converter_fields(), true);
      g.converters.push_back(std::move(x));
    } else if (s.kind == "capacitor") {
      CapacitorInput in;
      in.cap.id = s.id;
      apply_entries(in, s, capacitor_fields(), true);
      capacitors.push_back(std::move(in));
    } else if (s.kind == "load") {
      LoadSpec x;
      x.id = s.id;
      apply_entries(x, s, load_fields(), true);
      g.loads.push_back(std::move(x));
    } else if (s.kind == "breaker") {
      BreakerSpec x;
      x.id = s.id;
      apply_entries(x, s, breaker_fields(), true);
      g.breakers.push_back(std::move(x));
    } else if (s.kind == "fuse") {
      FuseSpec x;
      x.id = s.id;
      apply_entries(x, s, fuse_fields(), true);
      g.fuses.push_back(std::move(x));
    } else {
      throw ParseError("unknown section kind '" + s.kind + "'", s.line, 2);
    }
  }

  for (auto& gen : g.generators) finish_generator(gen, g);
  for (auto& [id, params] : dynamics) {
    GeneratorSpec* gen = g.find_generator(id);
    if (!gen) throw InputError("dangling reference: [dynamics " + id + "] names no generator");
    if (gen->dynamics) throw InputError("duplicate [dynamics " + id + "]");
    gen->dynamics = params;
  }
  for (auto& in : capacitors) {
    ConverterSpec* conv = g.find_converter(in.converter);
    if (!conv) throw InputError("dangling reference: [capacitor " + in.cap.id + "] converter = '" + in.converter + "'");
    if (conv->dc_link) throw InputError("converter '" + conv->id + "' already has a DC-link capacitor");
    conv->dc_link = in.cap;
  }
  for (auto& bus : g.buses) {
    if (bus.kind == BusKind::DC) bus.frequency = 0.0;
  }

  check_references(g);
  if (options.validate) {
    auto report = validate(g);
    if (!report.ok()) throw InputError("grid '" + g.name + "' failed validation:\n" + report.to_string());
  }
  return g;
}

std::string serialize_grid(const GridModel& g) {
  std::ostringstream out;
  GridHeader h{const_cast<GridModel*>(&g)};
  emit_section(out, "grid", g.name.empty() ? std::string("grid") : g.name, h, grid_fields());
  for (const auto& x : g.buses) emit_section(out, "bus", x.id, x, bus_fields());
  for (const auto& x : g.branches) emit_section(out, "branch", x.id, x, branch_fields());
  for (const auto& x : g.generators) {
    emit_section(out, "generator", x.id, x, generator_fields());
    if (x.dynamics) {
      DynamicsInput in;
      in.params = *x.dynamics;
      emit_section(out, "dynamics", x.id, in, dynamics_fields());
    }
  }
  for (const auto& x : g.batteries) emit_section(out, "battery", x.id, x, battery_fields());
  for (const auto& x : g.converters) {
    emit_section(out, "converter", x.id, x, converter_fields());
    if (x.dc_link) {
      CapacitorInput in{*x.dc_link, x.id};
      emit_section(out, "capacitor", x.dc_link->id, in, capacitor_fields());
    }
  }
  for (const auto& x : g.loads) emit_section(out, "load", x.id, x, load_fields());
  for (const auto& x : g.breakers) emit_section(out, "breaker", x.id, x, breaker_fields());
  for (const auto& x : g.fuses) emit_section(out, "fuse", x.id, x, fuse_fields());
  std::string s = out.str();
  while (s.size() >= 2 && s[s.size() - 1] == '\n' && s[s.size() - 2] == '\n') s.pop_back();
  return s;
}

void apply_modification(GridModel& grid, const Section& section) { modify_element(grid, section, false); }

GridModel load_grid(const std::string& source) {
  constexpr std::string_view prefix = "builtin:";
  if (source.rfind(prefix, 0) == 0) return builtin_fixture(std::string_view(source).substr(prefix.size()));
  std::ifstream in(source, std::ios::binary);
  if (!in) {
    // Bare fixture names (`--grid dc_vessel`) work when no such file exists.
    const auto names = builtin_fixture_names();
    if (std::find(names.begin(), names.end(), source) != names.end()) return builtin_fixture(source);
    throw InputError("cannot open grid file '" + source + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_grid(buf.str());
}

}  // namespace vessel::grid
