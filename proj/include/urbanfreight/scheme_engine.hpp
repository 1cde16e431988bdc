#pragma once

// Multi-echelon distribution schemes: layers of analytical (continuous
// approximation) or fixed-shuttle transport, builders for the direct, UCC and
// hub (Physical Internet) topologies, and scheme-level KPI aggregation.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "urbanfreight/core_model.hpp"

namespace urbanfreight {

enum class LayerMode { analytical, fixed_shuttle };

inline const char* to_string(LayerMode m) {
  return m == LayerMode::analytical ? "analytical" : "fixed_shuttle";
}

/// One vehicle class moving one demand within a layer.
struct FleetAssignment {
  std::string label;
  VehicleType vehicle;
  DemandProfile demand;
  /// fixed_shuttle only: share of the demand sent to each destination node.
  std::vector<double> destination_shares{1.0};

  bool operator==(const FleetAssignment&) const = default;
};

struct LayerSpec {
  std::string name;
  LayerMode mode{LayerMode::analytical};
  NetworkParams params;
  std::vector<FleetAssignment> fleet;
  /// Charged per delivery (stop) handled at this layer's destination node.
  double handling_cost_per_delivery{0.0};
  /// Analytical mode: one subregion of area A/n carrying demand/n is
  /// evaluated and every extensive KPI multiplied by n.
  int subregion_count{1};
  /// fixed_shuttle only: pinned tours per destination node.
  std::optional<std::int64_t> shuttle_tours;

  void validate() const {
    params.validate();
    if (subregion_count < 1) throw DomainError("layer '" + name + "': subregion_count must be >= 1");
    if (!(handling_cost_per_delivery >= 0.0))
      throw DomainError("layer '" + name + "': handling cost must be >= 0");
    if (mode == LayerMode::fixed_shuttle && shuttle_tours && *shuttle_tours < 1)
      throw DomainError("layer '" + name + "': shuttle_tours must be >= 1");
    for (const auto& a : fleet) {
      a.vehicle.validate();
      if (a.destination_shares.empty())
        throw DomainError("layer '" + name + "': assignment '" + a.label + "' has no destinations");
      double sum = 0.0;
      for (double s : a.destination_shares) {
        if (!(s >= 0.0 && s <= 1.0))
          throw DomainError("layer '" + name + "': destination shares must lie in [0, 1]");
        sum += s;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw DomainError("layer '" + name + "': destination shares of '" + a.label +
                          "' sum to " + std::to_string(sum) + ", expected 1");
    }
  }

  bool operator==(const LayerSpec&) const = default;
};

struct SchemeSpec {
  std::string name;
  std::vector<LayerSpec> layers;
  ExternalCostFactors external_factors;

  void validate() const {
    if (layers.empty()) throw DomainError("scheme '" + name + "' has no layers");
    external_factors.validate();
    for (const auto& l : layers) l.validate();
  }

  bool operator==(const SchemeSpec&) const = default;
};

struct AssignmentReport {
  std::string label;
  std::string vehicle_id;
  /// Per destination node (fixed_shuttle) or per subregion (analytical).
  std::int64_t tours{0};
  double distance_km{0.0};
  double fill_rate{0.0};
  BindingConstraint binding{BindingConstraint::capacity};
};

struct LayerReport {
  std::string name;
  KpiReport kpis;
  std::vector<AssignmentReport> assignments;
};

struct SchemeReport {
  std::string name;
  KpiReport totals;
  std::vector<LayerReport> layers;
};

namespace detail {

inline KpiReport evaluate_shuttles(const LayerSpec& layer, const ExternalCostFactors& factors,
                                   std::vector<AssignmentReport>& details) {
  const auto& p = layer.params;
  KpiReport r;
  for (const auto& a : layer.fleet) {
    const double speed = p.effective_speed(a.vehicle);
    for (double share : a.destination_shares) {
      const double weight = a.demand.total_weight_kg() * share;
      const double stops = a.demand.total_stops() * share;
      std::int64_t tours = 0;
      if (weight > 0.0 || stops > 0.0) {
        tours = layer.shuttle_tours.value_or(
            std::max<std::int64_t>(1, ceil_count(weight / a.vehicle.capacity_kg)));
      }
      const double distance = static_cast<double>(tours) * 2.0 * p.radius_km;
      const double time = distance / speed + p.stop_time_h * static_cast<double>(tours);
      double fill = 0.0;
      if (weight > 0.0) {
        fill = weight / static_cast<double>(tours) / a.vehicle.capacity_kg;
        if (fill > 1.0 + 1e-9) {
          throw ConsistencyError("layer '" + layer.name + "': " + std::to_string(tours) +
                                 " shuttle tours cannot carry " + std::to_string(weight) +
                                 " kg with vehicle '" + a.vehicle.id + "'");
        }
      }
      r.total_distance_km += distance;
      r.total_time_h += time;
      r.distance_cost += distance * a.vehicle.cost_per_km;
      r.time_cost += time * a.vehicle.cost_per_hour;
      r.loaded_weight_kg += weight;
      r.fill_weighted_load_kg += fill * weight;
      r.fractional_tours += weight / a.vehicle.capacity_kg;
      r.deliveries += stops;
      r.tours_by_vehicle[a.vehicle.id] += tours;
      details.push_back({a.label, a.vehicle.id, tours, distance, fill, BindingConstraint::capacity});
    }
  }
  r.handling_cost = r.deliveries * layer.handling_cost_per_delivery;
  r.external_by_category = external_cost(r.total_distance_km, factors).by_category;
  return r;
}

inline KpiReport evaluate_analytical(const LayerSpec& layer, const ExternalCostFactors& factors,
                                     std::vector<AssignmentReport>& details) {
  const auto n = layer.subregion_count;
  auto sub = layer.params;
  sub.area_km2 = layer.params.area_km2 / n;

  std::vector<TourPlan> plans;
  plans.reserve(layer.fleet.size());
  for (const auto& a : layer.fleet) {
    const auto demand = n == 1 ? a.demand : a.demand.scaled(1.0 / n);
    auto plan = solve_tour_plan(a.vehicle, demand, sub);
    details.push_back({a.label, a.vehicle.id, plan.tours, plan.distance_km, plan_fill_rate(plan),
                       plan.binding});
    plans.push_back(std::move(plan));
  }
  KpiReport one = plan_kpis(plans, sub, factors);
  for (const auto& p : plans) one.deliveries += p.stops;
  one.handling_cost = one.deliveries * layer.handling_cost_per_delivery;
  return n == 1 ? one : one.scaled(n);
}

}  // namespace detail

/// KPIs of one layer. Infeasible tour plans surface as InfeasibleError
/// annotated with the layer name.
inline LayerReport evaluate_layer(const LayerSpec& layer, const ExternalCostFactors& factors = {}) {
  layer.validate();
  LayerReport out;
  out.name = layer.name;
  try {
    out.kpis = layer.mode == LayerMode::fixed_shuttle
                   ? detail::evaluate_shuttles(layer, factors, out.assignments)
                   : detail::evaluate_analytical(layer, factors, out.assignments);
  } catch (const InfeasibleError& e) {
    throw e.annotated("layer '" + layer.name + "'");
  }
  return out;
}

/// Field-wise sum of the layer reports, in declaration order.
inline SchemeReport evaluate_scheme(const SchemeSpec& scheme) {
  scheme.validate();
  SchemeReport out;
  out.name = scheme.name;
  for (const auto& layer : scheme.layers) {
    try {
      out.layers.push_back(evaluate_layer(layer, scheme.external_factors));
    } catch (const InfeasibleError& e) {
      throw e.annotated("scheme '" + scheme.name + "'");
    }
    out.totals += out.layers.back().kpis;
  }
  return out;
}

/// Total weight entering a layer (all assignments).
inline double layer_weight_kg(const LayerSpec& layer) {
  std::vector<double> w;
  for (const auto& a : layer.fleet) w.push_back(a.demand.total_weight_kg());
  return exact_sum(w);
}

// ---------------------------------------------------------------------------
// Temperature compatibility
// ---------------------------------------------------------------------------

/// Whether a vehicle of class `vehicle` may carry goods of class `goods`.
/// `mixed_load` marks loads spanning several classes, which a normal (A)
/// vehicle carries in temperature-controlled containers.
inline bool can_carry(TemperatureClass vehicle, TemperatureClass goods, bool mixed_load) {
  if (vehicle == goods) return true;
  if (vehicle == TemperatureClass::T) {
    return goods == TemperatureClass::A || goods == TemperatureClass::F ||
           goods == TemperatureClass::S;
  }
  return vehicle == TemperatureClass::A && mixed_load;
}

// ---------------------------------------------------------------------------
// Scheme builders
// ---------------------------------------------------------------------------

/// Table-4 style parameters of one echelon.
struct LayerParams {
  double radius_km{0.0};
  double area_km2{0.0};
  double speed_kmh{0.0};
  double stop_time_h{0.0};

  NetworkParams network(const NetworkParams& defaults) const {
    auto p = defaults;
    p.radius_km = radius_km;
    if (area_km2 > 0.0) p.area_km2 = area_km2;
    p.stop_time_h = stop_time_h;
    return p;
  }

  VehicleType at_speed(VehicleType v) const {
    if (speed_kmh > 0.0) v.speed_kmh = speed_kmh;
    return v;
  }

  bool operator==(const LayerParams&) const = default;
};

/// Share of a supplier's demand (restricted to `classes`, empty = all) given to a vehicle.
struct SupplierFleetShare {
  VehicleType vehicle;
  double share{1.0};
  std::vector<TemperatureClass> classes;

  bool covers(TemperatureClass c) const {
    return classes.empty() || std::find(classes.begin(), classes.end(), c) != classes.end();
  }
  bool operator==(const SupplierFleetShare&) const = default;
};

struct SupplierSpec {
  std::string name;
  DemandProfile demand;
  std::vector<SupplierFleetShare> fleet;

  bool operator==(const SupplierSpec&) const = default;
};

/// City-layer vehicle serving the pooled demand of some temperature classes.
struct TemperatureGroup {
  VehicleType vehicle;
  std::vector<TemperatureClass> classes;

  bool operator==(const TemperatureGroup&) const = default;
};

struct OriginalConfig {
  LayerParams layer{30.0, 186.0, 20.0, 0.25};
  NetworkParams defaults;
};

struct UccConfig {
  VehicleType shuttle_vehicle;
  LayerParams shuttle{20.0, 0.0, 30.0, 0.5};
  LayerParams city{10.0, 186.0, 20.0, 0.25};
  std::vector<TemperatureGroup> city_fleet;
  double handling_cost_per_delivery{10.0};
  NetworkParams defaults;
};

struct HubConfig {
  VehicleType shuttle_vehicle;
  LayerParams shuttle{30.0, 0.0, 30.0, 0.5};
  LayerParams city{5.0, 186.0, 20.0, 0.25};
  std::vector<TemperatureGroup> city_fleet;
  double handling_cost_per_delivery{10.0};
  int hub_count{2};
  /// Share of total demand scheduled through each hub; empty = equal split.
  std::vector<double> hub_shares;
  /// Pool all suppliers' goods on shared shuttles per hub (true) or run one
  /// shuttle flow per supplier (false).
  bool shared_shuttles{true};
  std::optional<std::int64_t> shuttle_tours;
  NetworkParams defaults;
};

namespace detail {

inline void check_supplier(const SupplierSpec& s) {
  if (s.fleet.empty()) throw DomainError("supplier '" + s.name + "' has no fleet");
  const auto classes = s.demand.temperature_classes();
  const bool mixed = classes.size() > 1;
  for (auto c : classes) {
    double sum = 0.0;
    bool carried = false;
    for (const auto& f : s.fleet) {
      if (!f.covers(c)) continue;
      if (!(f.share >= 0.0 && f.share <= 1.0))
        throw DomainError("supplier '" + s.name + "': fleet shares must lie in [0, 1]");
      sum += f.share;
      carried = carried || can_carry(f.vehicle.temperature_class, c, mixed);
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw DomainError("supplier '" + s.name + "': fleet shares for class " +
                        std::string(to_string(c)) + " sum to " + std::to_string(sum) +
                        ", expected 1");
    }
    if (!carried) {
      throw DomainError("supplier '" + s.name + "': no fleet vehicle can carry class " +
                        std::string(to_string(c)) + " goods");
    }
  }
}

inline DemandProfile pooled_demand(const std::vector<SupplierSpec>& suppliers) {
  std::vector<DeliveryUnitType> units;
  for (const auto& s : suppliers) {
    units.insert(units.end(), s.demand.units().begin(), s.demand.units().end());
  }
  return DemandProfile::from_units(std::move(units));
}

inline std::vector<FleetAssignment> city_assignments(const std::vector<SupplierSpec>& suppliers,
                                                     const std::vector<TemperatureGroup>& groups,
                                                     const LayerParams& lp) {
  if (groups.empty()) throw DomainError("city layer has no vehicle groups");
  const auto pooled = pooled_demand(suppliers);
  for (auto c : pooled.temperature_classes()) {
    bool covered = false;
    for (const auto& g : groups) {
      if (std::find(g.classes.begin(), g.classes.end(), c) != g.classes.end()) {
        if (covered) {
          throw DomainError("temperature class " + std::string(to_string(c)) +
                            " assigned to more than one city vehicle group");
        }
        covered = true;
      }
    }
    if (!covered) {
      throw DomainError("no city vehicle group covers temperature class " +
                        std::string(to_string(c)));
    }
  }
  std::vector<FleetAssignment> out;
  for (const auto& g : groups) {
    const bool mixed = g.classes.size() > 1;
    for (auto c : g.classes) {
      if (!can_carry(g.vehicle.temperature_class, c, mixed)) {
        throw DomainError("vehicle '" + g.vehicle.id + "' cannot carry class " +
                          std::string(to_string(c)) + " goods");
      }
    }
    auto demand = pooled.filtered([&](TemperatureClass c) {
      return std::find(g.classes.begin(), g.classes.end(), c) != g.classes.end();
    });
    std::string label = g.vehicle.id + "[";
    for (auto c : g.classes) label += to_string(c);
    label += "]";
    out.push_back({label, lp.at_speed(g.vehicle), std::move(demand), {1.0}});
  }
  return out;
}

}  // namespace detail

/// Every supplier delivers its own stops directly: one analytical layer each.
inline SchemeSpec build_original(const std::string& name, const std::vector<SupplierSpec>& suppliers,
                                 const OriginalConfig& config,
                                 const ExternalCostFactors& factors) {
  if (suppliers.empty()) throw DomainError("scheme '" + name + "': no suppliers");
  SchemeSpec scheme{name, {}, factors};
  for (const auto& s : suppliers) {
    detail::check_supplier(s);
    LayerSpec layer;
    layer.name = s.name;
    layer.mode = LayerMode::analytical;
    layer.params = config.layer.network(config.defaults);
    for (const auto& f : s.fleet) {
      auto demand = s.demand.filtered([&](TemperatureClass c) { return f.covers(c); });
      layer.fleet.push_back({s.name + "/" + f.vehicle.id, config.layer.at_speed(f.vehicle),
                             demand.scaled(f.share), {1.0}});
    }
    scheme.layers.push_back(std::move(layer));
  }
  return scheme;
}

/// Suppliers shuttle to one consolidation centre; city vehicles deliver from it.
inline SchemeSpec build_ucc(const std::string& name, const std::vector<SupplierSpec>& suppliers,
                            const UccConfig& config, const ExternalCostFactors& factors) {
  if (suppliers.empty()) throw DomainError("scheme '" + name + "': no suppliers");
  if (config.shuttle_vehicle.id.empty()) throw DomainError("scheme '" + name + "': no shuttle vehicle");
  SchemeSpec scheme{name, {}, factors};

  LayerSpec inbound;
  inbound.name = "suppliers->ucc";
  inbound.mode = LayerMode::fixed_shuttle;
  inbound.params = config.shuttle.network(config.defaults);
  inbound.handling_cost_per_delivery = config.handling_cost_per_delivery;
  for (const auto& s : suppliers) {
    inbound.fleet.push_back(
        {s.name, config.shuttle.at_speed(config.shuttle_vehicle), s.demand, {1.0}});
  }

  LayerSpec city;
  city.name = "ucc->pos";
  city.mode = LayerMode::analytical;
  city.params = config.city.network(config.defaults);
  city.fleet = detail::city_assignments(suppliers, config.city_fleet, config.city);

  scheme.layers.push_back(std::move(inbound));
  scheme.layers.push_back(std::move(city));
  return scheme;
}

/// Suppliers shuttle to `hub_count` hubs, each serving its own subregion.
inline SchemeSpec build_pi(const std::string& name, const std::vector<SupplierSpec>& suppliers,
                           const HubConfig& config, const ExternalCostFactors& factors) {
  if (suppliers.empty()) throw DomainError("scheme '" + name + "': no suppliers");
  if (config.hub_count < 1) throw DomainError("scheme '" + name + "': hub_count must be >= 1");
  if (config.shuttle_vehicle.id.empty()) throw DomainError("scheme '" + name + "': no shuttle vehicle");

  std::vector<double> shares = config.hub_shares;
  if (shares.empty()) shares.assign(config.hub_count, 1.0 / config.hub_count);
  if (static_cast<int>(shares.size()) != config.hub_count)
    throw DomainError("scheme '" + name + "': hub_shares must list one share per hub");
  double total = 0.0;
  for (double s : shares) {
    if (!(s > 0.0 && s <= 1.0)) throw DomainError("scheme '" + name + "': hub shares must lie in (0, 1]");
    total += s;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw DomainError("scheme '" + name + "': hub demand split sums to " + std::to_string(total) +
                      ", expected 1");
  }
  const bool equal_split =
      std::all_of(shares.begin(), shares.end(), [&](double s) { return s == shares.front(); });

  SchemeSpec scheme{name, {}, factors};

  LayerSpec inbound;
  inbound.name = "suppliers->hubs";
  inbound.mode = LayerMode::fixed_shuttle;
  inbound.params = config.shuttle.network(config.defaults);
  inbound.handling_cost_per_delivery = config.handling_cost_per_delivery;
  inbound.shuttle_tours = config.shuttle_tours;
  const auto shuttle = config.shuttle.at_speed(config.shuttle_vehicle);
  if (config.shared_shuttles) {
    inbound.fleet.push_back({"shared", shuttle, detail::pooled_demand(suppliers), shares});
  } else {
    for (const auto& s : suppliers) inbound.fleet.push_back({s.name, shuttle, s.demand, shares});
  }
  scheme.layers.push_back(std::move(inbound));

  const auto assignments = detail::city_assignments(suppliers, config.city_fleet, config.city);
  if (equal_split) {
    LayerSpec city;
    city.name = "hubs->pos";
    city.mode = LayerMode::analytical;
    city.params = config.city.network(config.defaults);
    city.subregion_count = config.hub_count;
    city.fleet = assignments;
    scheme.layers.push_back(std::move(city));
  } else {
    for (int h = 0; h < config.hub_count; ++h) {
      LayerSpec city;
      city.name = "hub" + std::to_string(h + 1) + "->pos";
      city.mode = LayerMode::analytical;
      city.params = config.city.network(config.defaults);
      city.params.area_km2 /= config.hub_count;
      for (auto a : assignments) {
        a.demand = a.demand.scaled(shares[h]);
        city.fleet.push_back(std::move(a));
      }
      scheme.layers.push_back(std::move(city));
    }
  }
  return scheme;
}

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

enum class Kpi {
  distance,
  time,
  distance_cost,
  time_cost,
  transport_cost,
  handling_cost,
  total_cost,
  external_cost,
  fill_rate,
  tours
};

inline constexpr std::array<Kpi, 10> kAllKpis = {
    Kpi::distance,       Kpi::time,          Kpi::distance_cost, Kpi::time_cost,
    Kpi::transport_cost, Kpi::handling_cost, Kpi::total_cost,    Kpi::external_cost,
    Kpi::fill_rate,      Kpi::tours};

inline const char* kpi_name(Kpi k) {
  switch (k) {
    case Kpi::distance: return "distance_km";
    case Kpi::time: return "time_h";
    case Kpi::distance_cost: return "distance_cost";
    case Kpi::time_cost: return "time_cost";
    case Kpi::transport_cost: return "transport_cost";
    case Kpi::handling_cost: return "handling_cost";
    case Kpi::total_cost: return "total_cost";
    case Kpi::external_cost: return "external_cost";
    case Kpi::fill_rate: return "fill_rate";
    case Kpi::tours: return "tours";
  }
  return "?";
}

inline double kpi_value(const KpiReport& r, Kpi k) {
  switch (k) {
    case Kpi::distance: return r.total_distance_km;
    case Kpi::time: return r.total_time_h;
    case Kpi::distance_cost: return r.distance_cost;
    case Kpi::time_cost: return r.time_cost;
    case Kpi::transport_cost: return r.transport_cost();
    case Kpi::handling_cost: return r.handling_cost;
    case Kpi::total_cost: return r.total_cost();
    case Kpi::external_cost: return r.external_cost_total();
    case Kpi::fill_rate: return r.fill_rate();
    case Kpi::tours: return static_cast<double>(r.total_tours());
  }
  return 0.0;
}

/// Relative change in percent; absent when the baseline value is zero.
inline std::optional<double> percent_delta(double value, double baseline) {
  if (baseline == 0.0) {
    if (value == 0.0) return 0.0;
    return std::nullopt;
  }
  return (value - baseline) / baseline * 100.0;
}

struct ComparisonRow {
  std::string scheme;
  std::optional<SchemeReport> report;  // empty when infeasible
  std::string error;
  std::array<std::optional<double>, kAllKpis.size()> delta_pct{};

  bool feasible() const { return report.has_value(); }
};

struct ComparisonTable {
  std::string baseline;
  std::vector<ComparisonRow> rows;
};

/// Evaluates each scheme and expresses every KPI relative to the first one.
inline ComparisonTable compare_schemes(const std::vector<SchemeSpec>& schemes) {
  if (schemes.size() < 2) throw DomainError("compare_schemes needs at least two schemes");
  ComparisonTable table;
  table.baseline = schemes.front().name;
  for (const auto& s : schemes) {
    ComparisonRow row;
    row.scheme = s.name;
    try {
      row.report = evaluate_scheme(s);
    } catch (const InfeasibleError& e) {
      row.error = e.what();
    }
    table.rows.push_back(std::move(row));
  }
  const auto& base = table.rows.front();
  for (auto& row : table.rows) {
    if (!row.feasible() || !base.feasible()) continue;
    for (std::size_t k = 0; k < kAllKpis.size(); ++k) {
      row.delta_pct[k] = percent_delta(kpi_value(row.report->totals, kAllKpis[k]),
                                       kpi_value(base.report->totals, kAllKpis[k]));
    }
  }
  return table;
}

}  // namespace urbanfreight
