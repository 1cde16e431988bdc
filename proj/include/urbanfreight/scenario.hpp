#pragma once

// Scenario files: YAML description of vehicles, delivery units, supplier
// demand and scheme templates. Loading validates everything and reports the
// offending line; emit() writes a file that loads back to an equal Scenario.

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "urbanfreight/allocation_optimizer.hpp"
#include "urbanfreight/scheme_engine.hpp"

namespace urbanfreight {

struct DemandLine {
  std::string unit;
  TemperatureClass temperature_class{TemperatureClass::A};
  double stops{0.0};
  /// Average weight per stop; falls back to the catalogue unit weight.
  std::optional<double> avg_weight_kg;

  bool operator==(const DemandLine&) const = default;
};

struct FleetRef {
  std::string vehicle;
  double share{1.0};
  std::vector<TemperatureClass> classes;

  bool operator==(const FleetRef&) const = default;
};

struct SupplierDef {
  std::string name;
  std::vector<DemandLine> demand;
  std::vector<FleetRef> fleet;

  bool operator==(const SupplierDef&) const = default;
};

struct GroupRef {
  std::string vehicle;
  std::vector<TemperatureClass> classes;

  bool operator==(const GroupRef&) const = default;
};

/// Fixed np rows for one analytical layer, keyed by unit id.
struct AllocationOverride {
  int layer{1};
  std::vector<std::string> vehicles;
  std::vector<std::pair<std::string, std::vector<double>>> rows;

  bool operator==(const AllocationOverride&) const = default;
};

enum class SchemeKind { original, ucc, pi };

inline const char* to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::original: return "original";
    case SchemeKind::ucc: return "ucc";
    case SchemeKind::pi: return "pi";
  }
  return "?";
}

struct SchemeDef {
  std::string name;
  SchemeKind kind{SchemeKind::original};
  /// Restrict to these suppliers; empty = all.
  std::vector<std::string> suppliers;
  LayerParams layer{30.0, 186.0, 20.0, 0.25};
  std::string shuttle_vehicle;
  LayerParams shuttle;
  LayerParams city;
  std::vector<GroupRef> city_fleet;
  double handling_cost_per_delivery{10.0};
  int hub_count{2};
  std::vector<double> hub_shares;
  bool shared_shuttles{true};
  std::optional<std::int64_t> shuttle_tours;
  std::optional<AllocationOverride> allocation;

  bool operator==(const SchemeDef&) const = default;
};

struct Scenario {
  std::string name;
  std::map<std::string, double> metadata;
  NetworkParams defaults;
  ExternalCostFactors external_factors;
  std::vector<DeliveryUnitType> units;
  std::vector<VehicleType> vehicles;
  std::vector<SupplierDef> suppliers;
  std::vector<SchemeDef> schemes;
  SaConfig sa;

  const VehicleType* find_vehicle(std::string_view id) const {
    for (const auto& v : vehicles)
      if (v.id == id) return &v;
    return nullptr;
  }
  const DeliveryUnitType* find_unit(std::string_view id) const {
    for (const auto& u : units)
      if (u.id == id) return &u;
    return nullptr;
  }
  const SchemeDef* find_scheme(std::string_view name) const {
    for (const auto& s : schemes)
      if (s.name == name) return &s;
    return nullptr;
  }

  bool operator==(const Scenario&) const = default;
};

// ---------------------------------------------------------------------------
// Resolution into model types
// ---------------------------------------------------------------------------

inline std::vector<SupplierSpec> resolve_suppliers(const Scenario& sc,
                                                   const std::vector<std::string>& only = {}) {
  std::vector<SupplierSpec> out;
  for (const auto& s : sc.suppliers) {
    if (!only.empty() && std::find(only.begin(), only.end(), s.name) == only.end()) continue;
    std::vector<DeliveryUnitType> units;
    for (const auto& l : s.demand) {
      const auto* u = sc.find_unit(l.unit);
      if (!u) throw DomainError("supplier '" + s.name + "': unknown unit '" + l.unit + "'");
      // footprint is a property of the catalogue unit, not of the per-stop load
      units.push_back({l.unit, l.avg_weight_kg.value_or(u->avg_weight_kg), l.stops,
                       u->position_weight_kg.value_or(u->avg_weight_kg), l.temperature_class});
    }
    SupplierSpec spec{s.name, DemandProfile::from_units(std::move(units)), {}};
    for (const auto& f : s.fleet) {
      const auto* v = sc.find_vehicle(f.vehicle);
      if (!v) throw DomainError("supplier '" + s.name + "': unknown vehicle '" + f.vehicle + "'");
      spec.fleet.push_back({*v, f.share, f.classes});
    }
    out.push_back(std::move(spec));
  }
  return out;
}

inline const VehicleType& vehicle_ref(const Scenario& sc, const std::string& id) {
  const auto* v = sc.find_vehicle(id);
  if (!v) throw DomainError("unknown vehicle '" + id + "'");
  return *v;
}

/// Allocation matrix for an override, rows ordered as the problem's units.
inline AllocationMatrix override_matrix(const AllocationOverride& o, const OptimizationProblem& pb) {
  AllocationMatrix a(pb.units.size(), pb.fleet.size());
  for (const auto& [id, row] : o.rows) {
    if (row.size() != pb.fleet.size())
      throw DomainError("allocation row '" + id + "' has " + std::to_string(row.size()) +
                        " entries for " + std::to_string(pb.fleet.size()) + " vehicles");
    double sum = exact_sum(row);
    if (std::abs(sum - 1.0) > 1e-9)
      throw DomainError("allocation row '" + id + "' sums to " + std::to_string(sum) +
                        "; each unit type's shares must sum to 1");
    for (double x : row)
      if (!(x >= 0.0 && x <= 1.0))
        throw DomainError("allocation row '" + id + "' has a share outside [0, 1]");
  }
  for (std::size_t j = 0; j < pb.units.size(); ++j) {
    auto it = std::find_if(o.rows.begin(), o.rows.end(),
                           [&](const auto& r) { return r.first == pb.units[j].id; });
    if (it == o.rows.end())
      throw DomainError("allocation has no row for unit '" + pb.units[j].id + "'");
    for (std::size_t i = 0; i < pb.fleet.size(); ++i) a.at(j, i) = it->second[i];
  }
  for (const auto& [id, row] : o.rows) {
    if (std::none_of(pb.units.begin(), pb.units.end(), [&](const auto& u) { return u.id == id; }))
      throw DomainError("allocation row '" + id + "' names a unit the layer does not carry");
  }
  a.validate();
  return a;
}

inline SchemeSpec build_scheme(const Scenario& sc, const SchemeDef& def) {
  const auto suppliers = resolve_suppliers(sc, def.suppliers);
  for (const auto& name : def.suppliers) {
    if (std::none_of(sc.suppliers.begin(), sc.suppliers.end(),
                     [&](const auto& s) { return s.name == name; }))
      throw DomainError("scheme '" + def.name + "': unknown supplier '" + name + "'");
  }
  std::vector<TemperatureGroup> groups;
  for (const auto& g : def.city_fleet) groups.push_back({vehicle_ref(sc, g.vehicle), g.classes});

  SchemeSpec spec;
  switch (def.kind) {
    case SchemeKind::original:
      spec = build_original(def.name, suppliers, {def.layer, sc.defaults}, sc.external_factors);
      break;
    case SchemeKind::ucc: {
      UccConfig c{vehicle_ref(sc, def.shuttle_vehicle), def.shuttle, def.city, groups,
                  def.handling_cost_per_delivery, sc.defaults};
      spec = build_ucc(def.name, suppliers, c, sc.external_factors);
      break;
    }
    case SchemeKind::pi: {
      HubConfig c;
      c.shuttle_vehicle = vehicle_ref(sc, def.shuttle_vehicle);
      c.shuttle = def.shuttle;
      c.city = def.city;
      c.city_fleet = groups;
      c.handling_cost_per_delivery = def.handling_cost_per_delivery;
      c.hub_count = def.hub_count;
      c.hub_shares = def.hub_shares;
      c.shared_shuttles = def.shared_shuttles;
      c.shuttle_tours = def.shuttle_tours;
      c.defaults = sc.defaults;
      spec = build_pi(def.name, suppliers, c, sc.external_factors);
      break;
    }
  }
  if (def.allocation) {
    const auto& o = *def.allocation;
    if (o.layer < 1 || static_cast<std::size_t>(o.layer) > spec.layers.size())
      throw DomainError("scheme '" + def.name + "': allocation layer " + std::to_string(o.layer) +
                        " out of range");
    std::vector<VehicleType> fleet;
    for (const auto& id : o.vehicles) fleet.push_back(vehicle_ref(sc, id));
    const auto& layer = spec.layers[static_cast<std::size_t>(o.layer - 1)];
    const auto pb = problem_from_layer(layer, fleet);
    spec.layers[static_cast<std::size_t>(o.layer - 1)] =
        apply_allocation(layer, pb, override_matrix(o, pb));
  }
  spec.validate();
  return spec;
}

inline SchemeSpec build_scheme(const Scenario& sc, std::string_view name) {
  const auto* def = sc.find_scheme(name);
  if (!def) throw ValidationError(ValidationError::Kind::unresolved_reference,
                                  "unknown scheme '" + std::string(name) + "'");
  return build_scheme(sc, *def);
}

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

namespace detail {

class YamlReader {
 public:
  explicit YamlReader(std::string source) : source_(std::move(source)) {}

  static int line(const YAML::Node& n) {
    const auto m = n.Mark();
    return m.line >= 0 ? m.line + 1 : 0;
  }

  [[noreturn]] void fail(ValidationError::Kind kind, const std::string& msg, const YAML::Node& at) const {
    throw ValidationError(kind, msg, source_, line(at));
  }

  void expect_map(const YAML::Node& n, const std::string& what) const {
    if (!n.IsMap()) fail(ValidationError::Kind::parse, what + " must be a mapping", n);
  }
  void expect_seq(const YAML::Node& n, const std::string& what) const {
    if (!n.IsSequence()) fail(ValidationError::Kind::parse, what + " must be a list", n);
  }

  void allow(const YAML::Node& map, std::initializer_list<std::string_view> keys,
             const std::string& what) const {
    expect_map(map, what);
    for (auto it = map.begin(); it != map.end(); ++it) {
      const auto key = it->first.as<std::string>();
      if (std::find(keys.begin(), keys.end(), key) == keys.end())
        fail(ValidationError::Kind::unknown_field, what + ": unknown field '" + key + "'", it->first);
    }
  }

  YAML::Node require(const YAML::Node& map, const std::string& key, const std::string& what) const {
    const YAML::Node n = map[key];
    if (!n) fail(ValidationError::Kind::missing_field, what + ": missing field '" + key + "'", map);
    return n;
  }

  template <typename T>
  T as(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(ValidationError::Kind::parse, what + " must be a scalar", n);
    try {
      return n.as<T>();
    } catch (const YAML::BadConversion&) {
      fail(ValidationError::Kind::parse, what + ": cannot read '" + n.Scalar() + "'", n);
    }
  }

  double number(const YAML::Node& map, const std::string& key, const std::string& what) const {
    return as<double>(require(map, key, what), what + "." + key);
  }
  double number_or(const YAML::Node& map, const std::string& key, double fallback,
                   const std::string& what) const {
    const YAML::Node n = map[key];
    return n ? as<double>(n, what + "." + key) : fallback;
  }
  std::optional<double> optional_number(const YAML::Node& map, const std::string& key,
                                        const std::string& what) const {
    const YAML::Node n = map[key];
    if (!n) return std::nullopt;
    return as<double>(n, what + "." + key);
  }
  std::string text(const YAML::Node& map, const std::string& key, const std::string& what) const {
    return as<std::string>(require(map, key, what), what + "." + key);
  }

  TemperatureClass temperature(const YAML::Node& n, const std::string& what) const {
    const auto s = as<std::string>(n, what);
    const auto c = parse_temperature_class(s);
    if (!c) fail(ValidationError::Kind::parse, what + ": unknown temperature class '" + s + "'", n);
    return *c;
  }

  std::vector<TemperatureClass> classes(const YAML::Node& n, const std::string& what) const {
    std::vector<TemperatureClass> out;
    if (!n) return out;
    expect_seq(n, what);
    for (const auto& c : n) out.push_back(temperature(c, what));
    return out;
  }

  /// Re-raises a model DomainError as an invariant violation at `at`.
  template <typename F>
  void checked(const YAML::Node& at, F&& f) const {
    try {
      f();
    } catch (const DomainError& e) {
      fail(ValidationError::Kind::invariant, e.what(), at);
    }
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

inline LayerParams read_layer_params(const YamlReader& rd, const YAML::Node& n,
                                     const std::string& what, bool needs_area) {
  rd.allow(n, {"radius_km", "area_km2", "speed_kmh", "stop_time_h"}, what);
  LayerParams p;
  p.radius_km = rd.number(n, "radius_km", what);
  p.area_km2 = needs_area ? rd.number(n, "area_km2", what) : rd.number_or(n, "area_km2", 0.0, what);
  p.speed_kmh = rd.number(n, "speed_kmh", what);
  p.stop_time_h = rd.number(n, "stop_time_h", what);
  if (!(p.radius_km > 0.0)) rd.fail(ValidationError::Kind::invariant, what + ": radius_km must be > 0", n);
  if (!(p.speed_kmh > 0.0)) rd.fail(ValidationError::Kind::invariant, what + ": speed_kmh must be > 0", n);
  if (!(p.stop_time_h >= 0.0)) rd.fail(ValidationError::Kind::invariant, what + ": stop_time_h must be >= 0", n);
  if (needs_area && !(p.area_km2 > 0.0)) rd.fail(ValidationError::Kind::invariant, what + ": area_km2 must be > 0", n);
  return p;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  return out;
}

template <typename T>
T parse_number(const std::string& s, const std::string& what, const std::string& source, int line) {
  T value{};
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end || s.empty())
    throw ValidationError(ValidationError::Kind::parse, what + ": cannot read '" + s + "'", source, line);
  return value;
}

}  // namespace detail

/// Demand table with header supplier,unit_type,stops,avg_weight_kg,temperature_class.
inline std::vector<std::pair<std::string, DemandLine>> load_demand_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(ValidationError::Kind::parse, "cannot open demand table", path);
  std::vector<std::pair<std::string, DemandLine>> out;
  std::string line;
  int n = 0;
  const std::vector<std::string> header{"supplier", "unit_type", "stops", "avg_weight_kg",
                                        "temperature_class"};
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = detail::split_csv_line(line);
    if (n == 1) {
      if (cells != header)
        throw ValidationError(ValidationError::Kind::parse,
                              "expected header supplier,unit_type,stops,avg_weight_kg,temperature_class",
                              path, n);
      continue;
    }
    if (cells.size() != header.size())
      throw ValidationError(ValidationError::Kind::parse,
                            "expected 5 columns, found " + std::to_string(cells.size()), path, n);
    DemandLine d;
    d.unit = cells[1];
    d.stops = detail::parse_number<double>(cells[2], "stops", path, n);
    d.avg_weight_kg = detail::parse_number<double>(cells[3], "avg_weight_kg", path, n);
    const auto c = parse_temperature_class(cells[4]);
    if (!c)
      throw ValidationError(ValidationError::Kind::parse,
                            "unknown temperature class '" + cells[4] + "'", path, n);
    d.temperature_class = *c;
    out.push_back({cells[0], d});
  }
  return out;
}

inline Scenario parse_scenario(const std::string& text, const std::string& source = "<scenario>",
                               const std::string& base_dir = ".") {
  using K = ValidationError::Kind;
  detail::YamlReader rd(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ValidationError(K::parse, e.msg, source, e.mark.line >= 0 ? e.mark.line + 1 : 0);
  }
  if (!root || root.IsNull()) throw ValidationError(K::parse, "empty scenario", source);
  rd.allow(root, {"name", "metadata", "defaults", "external_factors", "units", "vehicles",
                  "suppliers", "demand_csv", "schemes", "sa"},
           "scenario");

  Scenario sc;
  sc.name = rd.text(root, "name", "scenario");

  if (const YAML::Node meta = root["metadata"]) {
    rd.expect_map(meta, "metadata");
    for (auto it = meta.begin(); it != meta.end(); ++it) {
      const auto key = it->first.as<std::string>();
      sc.metadata[key] = rd.as<double>(it->second, "metadata." + key);
    }
  }

  {
    const auto d = rd.require(root, "defaults", "scenario");
    rd.allow(d, {"area_km2", "daganzo_k", "congestion_factor", "shift_duration_h", "lead_time_h"},
             "defaults");
    sc.defaults.area_km2 = rd.number(d, "area_km2", "defaults");
    sc.defaults.daganzo_k = rd.number_or(d, "daganzo_k", 0.57, "defaults");
    sc.defaults.congestion_factor = rd.number_or(d, "congestion_factor", 1.0, "defaults");
    sc.defaults.shift_duration_h = rd.number_or(d, "shift_duration_h", 8.0, "defaults");
    sc.defaults.lead_time_h = rd.number_or(d, "lead_time_h", 8.0, "defaults");
    rd.checked(d, [&] {
      auto p = sc.defaults;
      p.radius_km = 1.0;
      p.validate();
    });
  }

  {
    const auto f = rd.require(root, "external_factors", "scenario");
    rd.allow(f, {"accident", "air_pollution", "climate_change", "noise", "congestion", "scale"},
             "external_factors");
    auto& e = sc.external_factors;
    e.accident = rd.number(f, "accident", "external_factors");
    e.air_pollution = rd.number(f, "air_pollution", "external_factors");
    e.climate_change = rd.number(f, "climate_change", "external_factors");
    e.noise = rd.number(f, "noise", "external_factors");
    e.congestion = rd.number(f, "congestion", "external_factors");
    e.scale = rd.number_or(f, "scale", 1.0, "external_factors");
    rd.checked(f, [&] { e.validate(); });
  }

  {
    const auto us = rd.require(root, "units", "scenario");
    rd.expect_seq(us, "units");
    for (const auto& n : us) {
      rd.allow(n, {"id", "avg_weight_kg", "position_weight_kg"}, "unit");
      DeliveryUnitType u;
      u.id = rd.text(n, "id", "unit");
      u.avg_weight_kg = rd.number(n, "avg_weight_kg", "unit '" + u.id + "'");
      u.position_weight_kg = rd.optional_number(n, "position_weight_kg", "unit '" + u.id + "'");
      rd.checked(n, [&] { u.validate(); });
      if (sc.find_unit(u.id)) rd.fail(K::invariant, "duplicate unit id '" + u.id + "'", n);
      sc.units.push_back(std::move(u));
    }
  }

  {
    const auto vs = rd.require(root, "vehicles", "scenario");
    rd.expect_seq(vs, "vehicles");
    for (const auto& n : vs) {
      rd.allow(n, {"id", "capacity_kg", "speed_kmh", "cost_per_km", "cost_per_hour",
                   "temperature_class", "max_units_footprint"},
               "vehicle");
      VehicleType v;
      v.id = rd.text(n, "id", "vehicle");
      const std::string what = "vehicle '" + v.id + "'";
      v.capacity_kg = rd.number(n, "capacity_kg", what);
      v.speed_kmh = rd.number(n, "speed_kmh", what);
      v.cost_per_km = rd.number(n, "cost_per_km", what);
      v.cost_per_hour = rd.number(n, "cost_per_hour", what);
      v.temperature_class = rd.temperature(rd.require(n, "temperature_class", what), what);
      v.max_units_footprint = rd.as<int>(rd.require(n, "max_units_footprint", what),
                                         what + ".max_units_footprint");
      rd.checked(n, [&] { v.validate(); });
      if (sc.find_vehicle(v.id)) rd.fail(K::invariant, "duplicate vehicle id '" + v.id + "'", n);
      sc.vehicles.push_back(std::move(v));
    }
  }

  std::map<std::string, YAML::Node> supplier_nodes;
  {
    const auto ss = rd.require(root, "suppliers", "scenario");
    rd.expect_seq(ss, "suppliers");
    for (const auto& n : ss) {
      rd.allow(n, {"name", "demand", "fleet"}, "supplier");
      SupplierDef s;
      s.name = rd.text(n, "name", "supplier");
      const std::string what = "supplier '" + s.name + "'";
      if (const YAML::Node dem = n["demand"]) {
        rd.expect_seq(dem, what + ".demand");
        for (const auto& l : dem) {
          rd.allow(l, {"unit", "temperature_class", "stops", "avg_weight_kg"}, what + " demand line");
          DemandLine d;
          d.unit = rd.text(l, "unit", what + " demand line");
          if (!sc.find_unit(d.unit))
            rd.fail(K::unresolved_reference, what + ": unknown unit '" + d.unit + "'", l["unit"]);
          d.temperature_class = rd.temperature(rd.require(l, "temperature_class", what), what);
          d.stops = rd.number(l, "stops", what + " demand line");
          d.avg_weight_kg = rd.optional_number(l, "avg_weight_kg", what + " demand line");
          if (!(d.stops >= 0.0)) rd.fail(K::invariant, what + ": stops must be >= 0", l);
          if (d.avg_weight_kg && !(*d.avg_weight_kg > 0.0))
            rd.fail(K::invariant, what + ": avg_weight_kg must be > 0", l);
          s.demand.push_back(d);
        }
      }
      const auto fl = rd.require(n, "fleet", what);
      rd.expect_seq(fl, what + ".fleet");
      for (const auto& f : fl) {
        rd.allow(f, {"vehicle", "share", "classes"}, what + " fleet entry");
        FleetRef r;
        r.vehicle = rd.text(f, "vehicle", what + " fleet entry");
        if (!sc.find_vehicle(r.vehicle))
          rd.fail(K::unresolved_reference, what + ": unknown vehicle '" + r.vehicle + "'", f["vehicle"]);
        r.share = rd.number_or(f, "share", 1.0, what + " fleet entry");
        r.classes = rd.classes(f["classes"], what + ".classes");
        s.fleet.push_back(std::move(r));
      }
      if (std::any_of(sc.suppliers.begin(), sc.suppliers.end(),
                      [&](const auto& o) { return o.name == s.name; }))
        rd.fail(K::invariant, "duplicate supplier '" + s.name + "'", n);
      supplier_nodes.emplace(s.name, static_cast<const YAML::Node&>(n));
      sc.suppliers.push_back(std::move(s));
    }
  }

  if (const YAML::Node csv = root["demand_csv"]) {
    std::string path = rd.as<std::string>(csv, "demand_csv");
    if (!path.empty() && path.front() != '/') path = base_dir + "/" + path;
    for (auto& [name, line] : load_demand_csv(path)) {
      auto it = std::find_if(sc.suppliers.begin(), sc.suppliers.end(),
                             [&](const auto& s) { return s.name == name; });
      if (it == sc.suppliers.end())
        rd.fail(K::unresolved_reference, "demand table names unknown supplier '" + name + "'", csv);
      if (!sc.find_unit(line.unit))
        rd.fail(K::unresolved_reference, "demand table names unknown unit '" + line.unit + "'", csv);
      it->demand.push_back(line);
    }
  }

  for (const auto& s : sc.suppliers) {
    rd.checked(supplier_nodes.at(s.name), [&] {
      for (auto& spec : resolve_suppliers(sc, {s.name})) detail::check_supplier(spec);
    });
  }

  {
    const auto ss = rd.require(root, "schemes", "scenario");
    rd.expect_seq(ss, "schemes");
    for (const auto& n : ss) {
      SchemeDef s;
      s.name = rd.text(n, "name", "scheme");
      const std::string what = "scheme '" + s.name + "'";
      const auto type = rd.text(n, "type", what);
      if (type == "original") {
        s.kind = SchemeKind::original;
        rd.allow(n, {"name", "type", "suppliers", "layer", "allocation"}, what);
        s.layer = detail::read_layer_params(rd, rd.require(n, "layer", what), what + ".layer", true);
      } else if (type == "ucc" || type == "pi") {
        s.kind = type == "ucc" ? SchemeKind::ucc : SchemeKind::pi;
        if (s.kind == SchemeKind::ucc) {
          rd.allow(n, {"name", "type", "suppliers", "shuttle_vehicle", "shuttle", "city",
                       "city_fleet", "handling_cost_per_delivery", "allocation"},
                   what);
        } else {
          rd.allow(n, {"name", "type", "suppliers", "shuttle_vehicle", "shuttle", "city",
                       "city_fleet", "handling_cost_per_delivery", "hub_count", "hub_shares",
                       "shared_shuttles", "shuttle_tours", "allocation"},
                   what);
        }
        s.shuttle_vehicle = rd.text(n, "shuttle_vehicle", what);
        if (!sc.find_vehicle(s.shuttle_vehicle))
          rd.fail(K::unresolved_reference, what + ": unknown vehicle '" + s.shuttle_vehicle + "'",
                  n["shuttle_vehicle"]);
        s.shuttle = detail::read_layer_params(rd, rd.require(n, "shuttle", what), what + ".shuttle", false);
        s.city = detail::read_layer_params(rd, rd.require(n, "city", what), what + ".city", true);
        const auto cf = rd.require(n, "city_fleet", what);
        rd.expect_seq(cf, what + ".city_fleet");
        for (const auto& g : cf) {
          rd.allow(g, {"vehicle", "classes"}, what + " city fleet entry");
          GroupRef r;
          r.vehicle = rd.text(g, "vehicle", what + " city fleet entry");
          if (!sc.find_vehicle(r.vehicle))
            rd.fail(K::unresolved_reference, what + ": unknown vehicle '" + r.vehicle + "'", g["vehicle"]);
          r.classes = rd.classes(rd.require(g, "classes", what + " city fleet entry"), what + ".classes");
          s.city_fleet.push_back(std::move(r));
        }
        s.handling_cost_per_delivery = rd.number(n, "handling_cost_per_delivery", what);
        if (s.kind == SchemeKind::pi) {
          s.hub_count = rd.as<int>(rd.require(n, "hub_count", what), what + ".hub_count");
          if (const YAML::Node hs = n["hub_shares"]) {
            rd.expect_seq(hs, what + ".hub_shares");
            for (const auto& x : hs) s.hub_shares.push_back(rd.as<double>(x, what + ".hub_shares"));
          }
          if (const YAML::Node sh = n["shared_shuttles"]) s.shared_shuttles = rd.as<bool>(sh, what + ".shared_shuttles");
          if (const YAML::Node st = n["shuttle_tours"])
            s.shuttle_tours = rd.as<std::int64_t>(st, what + ".shuttle_tours");
        }
      } else {
        rd.fail(K::parse, what + ": unknown scheme type '" + type + "' (original, ucc, pi)", n["type"]);
      }
      if (const YAML::Node sup = n["suppliers"]) {
        rd.expect_seq(sup, what + ".suppliers");
        for (const auto& x : sup) {
          auto name = rd.as<std::string>(x, what + ".suppliers");
          if (std::none_of(sc.suppliers.begin(), sc.suppliers.end(),
                           [&](const auto& o) { return o.name == name; }))
            rd.fail(K::unresolved_reference, what + ": unknown supplier '" + name + "'", x);
          s.suppliers.push_back(std::move(name));
        }
      }
      if (const YAML::Node al = n["allocation"]) {
        rd.allow(al, {"layer", "vehicles", "rows"}, what + ".allocation");
        AllocationOverride o;
        o.layer = rd.as<int>(rd.require(al, "layer", what + ".allocation"), what + ".allocation.layer");
        const auto vs = rd.require(al, "vehicles", what + ".allocation");
        rd.expect_seq(vs, what + ".allocation.vehicles");
        for (const auto& v : vs) {
          auto id = rd.as<std::string>(v, what + ".allocation.vehicles");
          if (!sc.find_vehicle(id))
            rd.fail(K::unresolved_reference, what + ": unknown vehicle '" + id + "'", v);
          o.vehicles.push_back(std::move(id));
        }
        const auto rows = rd.require(al, "rows", what + ".allocation");
        rd.expect_map(rows, what + ".allocation.rows");
        for (auto it = rows.begin(); it != rows.end(); ++it) {
          const auto id = it->first.as<std::string>();
          rd.expect_seq(it->second, what + ".allocation.rows." + id);
          std::vector<double> row;
          for (const auto& x : it->second) row.push_back(rd.as<double>(x, what + ".allocation.rows." + id));
          const double sum = exact_sum(row);
          if (std::abs(sum - 1.0) > 1e-9)
            rd.fail(K::invariant,
                    what + ": allocation row '" + id + "' sums to " + std::to_string(sum) +
                        "; each unit type's shares must sum to 1",
                    it->second);
          o.rows.push_back({id, std::move(row)});
        }
        s.allocation = std::move(o);
      }
      if (sc.find_scheme(s.name)) rd.fail(K::invariant, "duplicate scheme '" + s.name + "'", n);
      sc.schemes.push_back(std::move(s));
      rd.checked(n, [&] { build_scheme(sc, sc.schemes.back()); });
    }
  }

  if (const YAML::Node sa = root["sa"]) {
    rd.allow(sa, {"seed", "initial_temperature", "cooling_rate", "steps_per_temperature",
                  "min_temperature", "restarts", "penalty_weight", "grid_step"},
             "sa");
    auto& c = sc.sa;
    if (const YAML::Node s = sa["seed"]) c.seed = rd.as<std::uint64_t>(s, "sa.seed");
    c.initial_temperature = rd.optional_number(sa, "initial_temperature", "sa");
    c.cooling_rate = rd.number_or(sa, "cooling_rate", c.cooling_rate, "sa");
    if (const YAML::Node s = sa["steps_per_temperature"]) c.steps_per_temperature = rd.as<int>(s, "sa.steps_per_temperature");
    c.min_temperature = rd.optional_number(sa, "min_temperature", "sa");
    if (const YAML::Node s = sa["restarts"]) c.restarts = rd.as<int>(s, "sa.restarts");
    c.penalty_weight = rd.number_or(sa, "penalty_weight", c.penalty_weight, "sa");
    c.grid_step = rd.number_or(sa, "grid_step", c.grid_step, "sa");
    rd.checked(sa, [&] { c.validate(); });
  }
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(ValidationError::Kind::parse, "cannot open scenario file", path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto slash = path.find_last_of('/');
  return parse_scenario(ss.str(), path, slash == std::string::npos ? "." : path.substr(0, slash));
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

namespace detail {

inline void emit_number(YAML::Emitter& out, const std::string& key, double x) {
  out << YAML::Key << key << YAML::Value << format_double(x);
}

inline void emit_classes(YAML::Emitter& out, const std::vector<TemperatureClass>& cs) {
  out << YAML::Flow << YAML::BeginSeq;
  for (auto c : cs) out << std::string(to_string(c));
  out << YAML::EndSeq;
}

inline void emit_layer(YAML::Emitter& out, const std::string& key, const LayerParams& p,
                       bool with_area) {
  out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginMap;
  emit_number(out, "radius_km", p.radius_km);
  if (with_area || p.area_km2 > 0.0) emit_number(out, "area_km2", p.area_km2);
  emit_number(out, "speed_kmh", p.speed_kmh);
  emit_number(out, "stop_time_h", p.stop_time_h);
  out << YAML::EndMap;
}

}  // namespace detail

inline std::string emit_scenario(const Scenario& sc) {
  using detail::emit_number;
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << sc.name;
  if (!sc.metadata.empty()) {
    out << YAML::Key << "metadata" << YAML::Value << YAML::BeginMap;
    for (const auto& [k, v] : sc.metadata) emit_number(out, k, v);
    out << YAML::EndMap;
  }

  out << YAML::Key << "defaults" << YAML::Value << YAML::BeginMap;
  emit_number(out, "area_km2", sc.defaults.area_km2);
  emit_number(out, "daganzo_k", sc.defaults.daganzo_k);
  emit_number(out, "congestion_factor", sc.defaults.congestion_factor);
  emit_number(out, "shift_duration_h", sc.defaults.shift_duration_h);
  emit_number(out, "lead_time_h", sc.defaults.lead_time_h);
  out << YAML::EndMap;

  const auto& e = sc.external_factors;
  out << YAML::Key << "external_factors" << YAML::Value << YAML::BeginMap;
  emit_number(out, "accident", e.accident);
  emit_number(out, "air_pollution", e.air_pollution);
  emit_number(out, "climate_change", e.climate_change);
  emit_number(out, "noise", e.noise);
  emit_number(out, "congestion", e.congestion);
  emit_number(out, "scale", e.scale);
  out << YAML::EndMap;

  out << YAML::Key << "units" << YAML::Value << YAML::BeginSeq;
  for (const auto& u : sc.units) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "id" << YAML::Value << u.id;
    emit_number(out, "avg_weight_kg", u.avg_weight_kg);
    if (u.position_weight_kg) emit_number(out, "position_weight_kg", *u.position_weight_kg);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "vehicles" << YAML::Value << YAML::BeginSeq;
  for (const auto& v : sc.vehicles) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "id" << YAML::Value << v.id;
    emit_number(out, "capacity_kg", v.capacity_kg);
    emit_number(out, "speed_kmh", v.speed_kmh);
    emit_number(out, "cost_per_km", v.cost_per_km);
    emit_number(out, "cost_per_hour", v.cost_per_hour);
    out << YAML::Key << "temperature_class" << YAML::Value
        << std::string(to_string(v.temperature_class));
    out << YAML::Key << "max_units_footprint" << YAML::Value << v.max_units_footprint;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "suppliers" << YAML::Value << YAML::BeginSeq;
  for (const auto& s : sc.suppliers) {
    out << YAML::BeginMap << YAML::Key << "name" << YAML::Value << s.name;
    out << YAML::Key << "demand" << YAML::Value << YAML::BeginSeq;
    for (const auto& d : s.demand) {
      out << YAML::Flow << YAML::BeginMap << YAML::Key << "unit" << YAML::Value << d.unit;
      out << YAML::Key << "temperature_class" << YAML::Value
          << std::string(to_string(d.temperature_class));
      emit_number(out, "stops", d.stops);
      if (d.avg_weight_kg) emit_number(out, "avg_weight_kg", *d.avg_weight_kg);
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "fleet" << YAML::Value << YAML::BeginSeq;
    for (const auto& f : s.fleet) {
      out << YAML::Flow << YAML::BeginMap << YAML::Key << "vehicle" << YAML::Value << f.vehicle;
      emit_number(out, "share", f.share);
      if (!f.classes.empty()) {
        out << YAML::Key << "classes" << YAML::Value;
        detail::emit_classes(out, f.classes);
      }
      out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "schemes" << YAML::Value << YAML::BeginSeq;
  for (const auto& s : sc.schemes) {
    out << YAML::BeginMap << YAML::Key << "name" << YAML::Value << s.name;
    out << YAML::Key << "type" << YAML::Value << to_string(s.kind);
    if (!s.suppliers.empty()) {
      out << YAML::Key << "suppliers" << YAML::Value << YAML::Flow << s.suppliers;
    }
    if (s.kind == SchemeKind::original) {
      detail::emit_layer(out, "layer", s.layer, true);
    } else {
      out << YAML::Key << "shuttle_vehicle" << YAML::Value << s.shuttle_vehicle;
      detail::emit_layer(out, "shuttle", s.shuttle, false);
      detail::emit_layer(out, "city", s.city, true);
      out << YAML::Key << "city_fleet" << YAML::Value << YAML::BeginSeq;
      for (const auto& g : s.city_fleet) {
        out << YAML::Flow << YAML::BeginMap << YAML::Key << "vehicle" << YAML::Value << g.vehicle;
        out << YAML::Key << "classes" << YAML::Value;
        detail::emit_classes(out, g.classes);
        out << YAML::EndMap;
      }
      out << YAML::EndSeq;
      emit_number(out, "handling_cost_per_delivery", s.handling_cost_per_delivery);
      if (s.kind == SchemeKind::pi) {
        out << YAML::Key << "hub_count" << YAML::Value << s.hub_count;
        if (!s.hub_shares.empty()) {
          out << YAML::Key << "hub_shares" << YAML::Value << YAML::Flow << YAML::BeginSeq;
          for (double x : s.hub_shares) out << format_double(x);
          out << YAML::EndSeq;
        }
        out << YAML::Key << "shared_shuttles" << YAML::Value << s.shared_shuttles;
        if (s.shuttle_tours) out << YAML::Key << "shuttle_tours" << YAML::Value << *s.shuttle_tours;
      }
    }
    if (s.allocation) {
      const auto& o = *s.allocation;
      out << YAML::Key << "allocation" << YAML::Value << YAML::BeginMap;
      out << YAML::Key << "layer" << YAML::Value << o.layer;
      out << YAML::Key << "vehicles" << YAML::Value << YAML::Flow << o.vehicles;
      out << YAML::Key << "rows" << YAML::Value << YAML::BeginMap;
      for (const auto& [id, row] : o.rows) {
        out << YAML::Key << id << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (double x : row) out << format_double(x);
        out << YAML::EndSeq;
      }
      out << YAML::EndMap << YAML::EndMap;
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  const auto& c = sc.sa;
  out << YAML::Key << "sa" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  if (c.initial_temperature) emit_number(out, "initial_temperature", *c.initial_temperature);
  emit_number(out, "cooling_rate", c.cooling_rate);
  out << YAML::Key << "steps_per_temperature" << YAML::Value << c.steps_per_temperature;
  if (c.min_temperature) emit_number(out, "min_temperature", *c.min_temperature);
  out << YAML::Key << "restarts" << YAML::Value << c.restarts;
  emit_number(out, "penalty_weight", c.penalty_weight);
  emit_number(out, "grid_step", c.grid_step);
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace urbanfreight
