#pragma once

// Continuous-approximation cost model for one distribution echelon:
// tour-count fixed point, tour length, distance/time cost, external impacts,
// effective (footprint-limited) capacity and fill rate.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "urbanfreight/errors.hpp"

namespace urbanfreight {

// ---------------------------------------------------------------------------
// Small numeric helpers
// ---------------------------------------------------------------------------

/// Neumaier-compensated sum. Totals of decimal inputs come out correctly
/// rounded, and independent of summation order in practice.
template <typename Range>
double exact_sum(const Range& values) {
  double sum = 0.0;
  double carry = 0.0;
  for (double x : values) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

inline double exact_sum(std::initializer_list<double> values) {
  return exact_sum<std::initializer_list<double>>(values);
}

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

enum class TemperatureClass { A, F, S, T, U };

inline constexpr std::array<TemperatureClass, 5> kAllTemperatureClasses = {
    TemperatureClass::A, TemperatureClass::F, TemperatureClass::S, TemperatureClass::T,
    TemperatureClass::U};

inline std::string_view to_string(TemperatureClass c) {
  switch (c) {
    case TemperatureClass::A: return "A";
    case TemperatureClass::F: return "F";
    case TemperatureClass::S: return "S";
    case TemperatureClass::T: return "T";
    case TemperatureClass::U: return "U";
  }
  return "?";
}

inline std::optional<TemperatureClass> parse_temperature_class(std::string_view s) {
  for (auto c : kAllTemperatureClasses) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

/// A vehicle class: weight capacity, speed, unit costs and floor footprint.
struct VehicleType {
  std::string id;
  double capacity_kg{0.0};
  double speed_kmh{0.0};
  double cost_per_km{0.0};
  double cost_per_hour{0.0};
  TemperatureClass temperature_class{TemperatureClass::A};
  /// Pallet-equivalent floor positions.
  int max_units_footprint{1};

  void validate() const {
    if (!(capacity_kg > 0.0)) throw DomainError("vehicle '" + id + "': capacity_kg must be > 0");
    if (!(speed_kmh > 0.0)) throw DomainError("vehicle '" + id + "': speed_kmh must be > 0");
    if (!(cost_per_km >= 0.0)) throw DomainError("vehicle '" + id + "': cost_per_km must be >= 0");
    if (!(cost_per_hour >= 0.0))
      throw DomainError("vehicle '" + id + "': cost_per_hour must be >= 0");
    if (max_units_footprint < 1)
      throw DomainError("vehicle '" + id + "': max_units_footprint must be >= 1");
  }

  bool operator==(const VehicleType&) const = default;
};

/// A class of delivery units (parcel, pallet, roll) as seen by one demand:
/// average weight delivered per stop and number of stops.
struct DeliveryUnitType {
  std::string id;
  double avg_weight_kg{0.0};
  /// Stop count. Fractional values appear when demand is split.
  double stops{0.0};
  /// Weight of one footprint position; falls back to avg_weight_kg.
  std::optional<double> position_weight_kg;
  TemperatureClass temperature_class{TemperatureClass::A};

  double footprint_weight_kg() const { return position_weight_kg.value_or(avg_weight_kg); }
  double total_weight_kg() const { return avg_weight_kg * stops; }

  void validate() const {
    if (!(avg_weight_kg > 0.0))
      throw DomainError("delivery unit '" + id + "': avg_weight_kg must be > 0");
    if (!(stops >= 0.0)) throw DomainError("delivery unit '" + id + "': stops must be >= 0");
    if (position_weight_kg && !(*position_weight_kg > 0.0))
      throw DomainError("delivery unit '" + id + "': position_weight_kg must be > 0");
  }

  bool operator==(const DeliveryUnitType&) const = default;
};

/// Daily demand served by one vehicle class: unit mix plus totals W and Nss.
class DemandProfile {
 public:
  DemandProfile() = default;

  /// Totals are derived from the units: W = sum(w_j * Ns_j), Nss = sum(Ns_j).
  static DemandProfile from_units(std::vector<DeliveryUnitType> units) {
    DemandProfile d;
    for (const auto& u : units) u.validate();
    d.units_ = std::move(units);
    d.recompute();
    return d;
  }

  /// Totals only, no unit breakdown.
  static DemandProfile aggregate(double total_weight_kg, double total_stops) {
    if (!(total_weight_kg >= 0.0) || !(total_stops >= 0.0))
      throw DomainError("demand totals must be >= 0");
    DemandProfile d;
    d.weight_ = total_weight_kg;
    d.stops_ = total_stops;
    return d;
  }

  const std::vector<DeliveryUnitType>& units() const { return units_; }
  double total_weight_kg() const { return weight_; }
  double total_stops() const { return stops_; }
  bool empty() const { return weight_ == 0.0 && stops_ == 0.0; }
  bool derived_from_units() const { return !units_.empty(); }

  /// Every stop count multiplied by `factor` (weights per stop unchanged).
  DemandProfile scaled(double factor) const {
    if (!(factor >= 0.0)) throw DomainError("demand scale factor must be >= 0");
    if (units_.empty()) return aggregate(weight_ * factor, stops_ * factor);
    auto units = units_;
    for (auto& u : units) u.stops *= factor;
    return from_units(std::move(units));
  }

  /// Units whose temperature class satisfies `keep`.
  DemandProfile filtered(const std::function<bool(TemperatureClass)>& keep) const {
    std::vector<DeliveryUnitType> units;
    for (const auto& u : units_) {
      if (keep(u.temperature_class)) units.push_back(u);
    }
    return from_units(std::move(units));
  }

  DemandProfile merged(const DemandProfile& other) const {
    if ((units_.empty() && !empty()) || (other.units_.empty() && !other.empty())) {
      return aggregate(exact_sum({weight_, other.weight_}), exact_sum({stops_, other.stops_}));
    }
    auto units = units_;
    units.insert(units.end(), other.units_.begin(), other.units_.end());
    return from_units(std::move(units));
  }

  /// The unit type carrying the most weight (ties: heavier footprint position).
  const DeliveryUnitType* dominant_unit() const {
    std::map<std::string, std::pair<double, double>> by_id;  // weight, footprint weight
    for (const auto& u : units_) {
      if (u.stops <= 0.0) continue;
      auto& slot = by_id[u.id];
      slot.first += u.total_weight_kg();
      slot.second = std::max(slot.second, u.footprint_weight_kg());
    }
    const DeliveryUnitType* best = nullptr;
    std::pair<double, double> best_key{-1.0, -1.0};
    for (const auto& u : units_) {
      if (u.stops <= 0.0) continue;
      const auto key = by_id[u.id];
      if (key > best_key) {
        best_key = key;
        best = &u;
      }
    }
    return best;
  }

  std::vector<TemperatureClass> temperature_classes() const {
    std::vector<TemperatureClass> out;
    for (const auto& u : units_) {
      if (u.stops > 0.0 &&
          std::find(out.begin(), out.end(), u.temperature_class) == out.end()) {
        out.push_back(u.temperature_class);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  bool operator==(const DemandProfile&) const = default;

 private:
  void recompute() {
    std::vector<double> weights;
    std::vector<double> stops;
    weights.reserve(units_.size());
    stops.reserve(units_.size());
    for (const auto& u : units_) {
      weights.push_back(u.total_weight_kg());
      stops.push_back(u.stops);
    }
    weight_ = exact_sum(weights);
    stops_ = exact_sum(stops);
  }

  std::vector<DeliveryUnitType> units_;
  double weight_{0.0};
  double stops_{0.0};
};

/// Geometry and operating parameters of one echelon.
struct NetworkParams {
  /// Average distance depot -> served area (r).
  double radius_km{0.0};
  double area_km2{0.0};
  double daganzo_k{0.57};
  /// Divisor applied to nominal speed (beta >= 1).
  double congestion_factor{1.0};
  double stop_time_h{0.0};
  double shift_duration_h{8.0};
  double lead_time_h{8.0};

  void validate() const {
    if (!(radius_km > 0.0)) throw DomainError("radius_km must be > 0");
    if (!(area_km2 > 0.0)) throw DomainError("area_km2 must be > 0");
    if (!(daganzo_k > 0.0)) throw DomainError("daganzo_k must be > 0");
    if (!(congestion_factor >= 1.0)) throw DomainError("congestion_factor must be >= 1");
    if (!(stop_time_h >= 0.0)) throw DomainError("stop_time_h must be >= 0");
    if (!(shift_duration_h > 0.0)) throw DomainError("shift_duration_h must be > 0");
    if (!(lead_time_h > 0.0) || lead_time_h > 24.0)
      throw DomainError("lead_time_h must lie in (0, 24]");
  }

  double effective_speed(const VehicleType& v) const { return v.speed_kmh / congestion_factor; }

  bool operator==(const NetworkParams&) const = default;
};

inline constexpr std::size_t kExternalCategories = 5;
inline constexpr std::array<std::string_view, kExternalCategories> kExternalCategoryNames = {
    "accident", "air_pollution", "climate_change", "noise", "congestion"};

/// Monetised external impacts per vehicle-km.
struct ExternalCostFactors {
  double accident{0.0};
  double air_pollution{0.0};
  double climate_change{0.0};
  double noise{0.0};
  double congestion{0.0};
  /// Unit reconciliation multiplier applied to every category.
  double scale{1.0};

  std::array<double, kExternalCategories> categories() const {
    return {accident, air_pollution, climate_change, noise, congestion};
  }

  /// p, the combined factor per v.km (scale not applied).
  double total() const { return exact_sum(categories()); }

  void validate() const {
    for (double f : categories()) {
      if (!(f >= 0.0)) throw DomainError("external cost factors must be >= 0");
    }
    if (!(scale > 0.0)) throw DomainError("external cost scale must be > 0");
  }

  /// Per-v.km values from the INFRAS/IWW study plus TU Delft congestion.
  static ExternalCostFactors reference() { return {3.4, 20.5, 6.3, 27.4, 4.0, 1.0}; }

  bool operator==(const ExternalCostFactors&) const = default;
};

struct TourPlan {
  VehicleType vehicle;
  std::int64_t tours{0};
  double distance_km{0.0};
  BindingConstraint binding{BindingConstraint::capacity};
  double effective_capacity_kg{0.0};
  double weight_kg{0.0};
  double stops{0.0};
};

struct ExternalCost {
  double total{0.0};
  std::array<double, kExternalCategories> by_category{};
};

/// KPIs of one layer or scheme. Derived totals are methods so the identities
/// (transport = distance + time, external = sum of categories) hold exactly.
struct KpiReport {
  double total_distance_km{0.0};
  double total_time_h{0.0};
  double distance_cost{0.0};
  double time_cost{0.0};
  double handling_cost{0.0};
  std::array<double, kExternalCategories> external_by_category{};
  double loaded_weight_kg{0.0};
  /// sum(fill_k * weight_k); fill_rate() divides by loaded_weight_kg.
  double fill_weighted_load_kg{0.0};
  double deliveries{0.0};
  /// Weight-implied tours, sum(W / effective capacity).
  double fractional_tours{0.0};
  std::map<std::string, std::int64_t> tours_by_vehicle;

  double transport_cost() const { return distance_cost + time_cost; }
  double total_cost() const { return transport_cost() + handling_cost; }
  double external_cost_total() const { return exact_sum(external_by_category); }
  double fill_rate() const {
    return loaded_weight_kg > 0.0 ? fill_weighted_load_kg / loaded_weight_kg : 0.0;
  }
  std::int64_t total_tours() const {
    std::int64_t n = 0;
    for (const auto& [id, t] : tours_by_vehicle) n += t;
    return n;
  }

  KpiReport& operator+=(const KpiReport& o) {
    total_distance_km += o.total_distance_km;
    total_time_h += o.total_time_h;
    distance_cost += o.distance_cost;
    time_cost += o.time_cost;
    handling_cost += o.handling_cost;
    for (std::size_t c = 0; c < kExternalCategories; ++c)
      external_by_category[c] += o.external_by_category[c];
    loaded_weight_kg += o.loaded_weight_kg;
    fill_weighted_load_kg += o.fill_weighted_load_kg;
    deliveries += o.deliveries;
    fractional_tours += o.fractional_tours;
    for (const auto& [id, t] : o.tours_by_vehicle) tours_by_vehicle[id] += t;
    return *this;
  }

  /// Every extensive field multiplied by `n` (fill rate unchanged).
  KpiReport scaled(std::int64_t n) const {
    const auto f = static_cast<double>(n);
    KpiReport r = *this;
    r.total_distance_km *= f;
    r.total_time_h *= f;
    r.distance_cost *= f;
    r.time_cost *= f;
    r.handling_cost *= f;
    for (auto& e : r.external_by_category) e *= f;
    r.loaded_weight_kg *= f;
    r.fill_weighted_load_kg *= f;
    r.deliveries *= f;
    r.fractional_tours *= f;
    for (auto& [id, t] : r.tours_by_vehicle) t *= n;
    return r;
  }

  bool operator==(const KpiReport&) const = default;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Total distance of `tours` tours serving `stops` stops: 2*r*m + k*sqrt(A*Ns).
inline double route_distance(std::int64_t tours, double stops, const NetworkParams& params) {
  if (tours < 0) throw DomainError("route_distance: tours must be >= 0");
  if (!(stops >= 0.0)) throw DomainError("route_distance: stops must be >= 0");
  return 2.0 * params.radius_km * static_cast<double>(tours) +
         params.daganzo_k * std::sqrt(params.area_km2 * stops);
}

/// Weight a vehicle can carry when its floor fills with `unit` positions.
inline double effective_capacity(const VehicleType& vehicle, const DeliveryUnitType& unit) {
  vehicle.validate();
  return std::min(vehicle.capacity_kg,
                  static_cast<double>(vehicle.max_units_footprint) * unit.footprint_weight_kg());
}

/// Effective capacity for a (possibly mixed) demand: uses its dominant unit.
inline double effective_capacity(const VehicleType& vehicle, const DemandProfile& demand) {
  if (const auto* unit = demand.dominant_unit()) return effective_capacity(vehicle, *unit);
  vehicle.validate();
  return vehicle.capacity_kg;
}

/// The three right-hand ceilings of the tour-count equation evaluated at m.
struct TourCeilings {
  std::int64_t capacity{0};
  std::int64_t shift{0};
  std::int64_t lead_time{0};

  std::int64_t max() const { return std::max({capacity, shift, lead_time}); }
  BindingConstraint binding() const {
    if (capacity >= shift && capacity >= lead_time) return BindingConstraint::capacity;
    if (shift >= lead_time) return BindingConstraint::shift;
    return BindingConstraint::lead_time;
  }
};

namespace detail {

inline std::int64_t ceil_count(double x) {
  if (!std::isfinite(x)) throw DomainError("non-finite tour ceiling");
  return static_cast<std::int64_t>(std::ceil(x));
}

struct CeilingInputs {
  double weight_kg;
  double stops;
  double effective_capacity_kg;
  double speed_kmh;  // already divided by the congestion factor
};

inline TourCeilings ceilings_at(const CeilingInputs& in, const NetworkParams& p,
                                std::int64_t tours) {
  const double d = route_distance(tours, in.stops, p);
  TourCeilings c;
  c.capacity = ceil_count(in.weight_kg / in.effective_capacity_kg);
  c.shift = ceil_count((d / in.speed_kmh + p.stop_time_h * in.stops) / p.shift_duration_h);
  c.lead_time = ceil_count(((d - p.radius_km) / in.speed_kmh + p.stop_time_h * (in.stops - 1.0)) /
                           p.lead_time_h);
  return c;
}

}  // namespace detail

/// Ceilings for a vehicle/demand pair at a given tour count.
inline TourCeilings tour_ceilings(const VehicleType& vehicle, const DemandProfile& demand,
                                  const NetworkParams& params, std::int64_t tours) {
  return detail::ceilings_at({demand.total_weight_kg(), demand.total_stops(),
                              effective_capacity(vehicle, demand), params.effective_speed(vehicle)},
                             params, tours);
}

struct SolverOptions {
  int iteration_cap{10'000};
};

/// Smallest tour count m with m = max(ceilings(route_distance(m))).
///
/// Iterates upward from the capacity ceiling; every ceiling is nondecreasing
/// in m, so the first repeat is the least fixed point. Throws InfeasibleError
/// when the iteration provably diverges (an extra tour adds at least a full
/// lead-time or shift window) or exceeds the cap.
inline TourPlan solve_tour_plan(const VehicleType& vehicle, const DemandProfile& demand,
                                const NetworkParams& params, SolverOptions options = {}) {
  vehicle.validate();
  params.validate();

  TourPlan plan;
  plan.vehicle = vehicle;
  plan.weight_kg = demand.total_weight_kg();
  plan.stops = demand.total_stops();
  plan.effective_capacity_kg = effective_capacity(vehicle, demand);
  if (demand.empty()) return plan;

  const detail::CeilingInputs in{demand.total_weight_kg(), demand.total_stops(),
                                 plan.effective_capacity_kg, params.effective_speed(vehicle)};
  // Hours added to the shift and lead-time numerators by one more tour.
  const double per_tour_h = 2.0 * params.radius_km / in.speed_kmh;

  std::int64_t m = detail::ceil_count(in.weight_kg / in.effective_capacity_kg);
  m = std::max<std::int64_t>(m, 0);
  for (int iter = 0; iter < options.iteration_cap; ++iter) {
    const auto c = detail::ceilings_at(in, params, m);
    const auto next = c.max();
    if (next == m) {
      plan.tours = m;
      plan.distance_km = route_distance(m, in.stops, params);
      plan.binding = c.binding();
      return plan;
    }
    if (c.lead_time > m && per_tour_h >= params.lead_time_h) {
      throw InfeasibleError(BindingConstraint::lead_time,
                            "lead time " + std::to_string(params.lead_time_h) +
                                " h cannot absorb the " + std::to_string(per_tour_h) +
                                " h round trip each added tour costs (vehicle '" + vehicle.id +
                                "')");
    }
    if (c.shift > m && per_tour_h >= params.shift_duration_h) {
      throw InfeasibleError(BindingConstraint::shift,
                            "shift duration " + std::to_string(params.shift_duration_h) +
                                " h cannot absorb the round trip each added tour costs (vehicle '" +
                                vehicle.id + "')");
    }
    m = next;
  }
  const auto c = detail::ceilings_at(in, params, m);
  throw InfeasibleError(c.binding(), "tour count did not converge within " +
                                         std::to_string(options.iteration_cap) +
                                         " iterations (vehicle '" + vehicle.id + "', m = " +
                                         std::to_string(m) + ")");
}

/// Hours on the road plus at stops for one plan.
inline double plan_time_h(const TourPlan& plan, const NetworkParams& params) {
  const double speed = params.effective_speed(plan.vehicle);
  if (!(speed > 0.0)) throw DomainError("vehicle '" + plan.vehicle.id + "' has zero speed");
  if (plan.tours == 0 && plan.stops == 0.0) return 0.0;
  return plan.distance_km / speed + params.stop_time_h * plan.stops;
}

/// sum_i d_i * cd_i.
inline double distance_cost(std::span<const TourPlan> plans) {
  double sum = 0.0;
  for (const auto& p : plans) sum += p.distance_km * p.vehicle.cost_per_km;
  return sum;
}

inline double total_time_h(std::span<const TourPlan> plans, const NetworkParams& params) {
  double sum = 0.0;
  for (const auto& p : plans) sum += plan_time_h(p, params);
  return sum;
}

/// sum_i (d_i / (v_i / beta) + tstop * Ns_i) * ct_i.
inline double time_cost(std::span<const TourPlan> plans, const NetworkParams& params) {
  double sum = 0.0;
  for (const auto& p : plans) sum += plan_time_h(p, params) * p.vehicle.cost_per_hour;
  return sum;
}

inline ExternalCost external_cost(double total_distance_km, const ExternalCostFactors& factors) {
  if (!(total_distance_km >= 0.0)) throw DomainError("external_cost: distance must be >= 0");
  ExternalCost out;
  const auto f = factors.categories();
  for (std::size_t c = 0; c < kExternalCategories; ++c)
    out.by_category[c] = f[c] * factors.scale * total_distance_km;
  out.total = exact_sum(out.by_category);
  return out;
}

/// Load per tour over effective capacity.
inline double fill_rate(double loaded_weight_kg, const VehicleType& vehicle,
                        const DeliveryUnitType& dominant_unit, std::int64_t tours) {
  if (!(loaded_weight_kg >= 0.0)) throw DomainError("fill_rate: load must be >= 0");
  if (loaded_weight_kg == 0.0) return 0.0;
  if (tours < 1) throw DomainError("fill_rate: a positive load needs at least one tour");
  const double cap = effective_capacity(vehicle, dominant_unit);
  const double rate = (loaded_weight_kg / static_cast<double>(tours)) / cap;
  if (rate > 1.0 + 1e-9) {
    throw ConsistencyError("fill_rate: " + std::to_string(loaded_weight_kg) + " kg over " +
                           std::to_string(tours) + " tours exceeds effective capacity " +
                           std::to_string(cap) + " kg of vehicle '" + vehicle.id + "'");
  }
  return std::min(rate, 1.0);
}

/// Fill rate of a solved plan against its own effective capacity.
inline double plan_fill_rate(const TourPlan& plan) {
  if (plan.weight_kg == 0.0) return 0.0;
  if (plan.tours < 1) throw DomainError("fill_rate: a positive load needs at least one tour");
  const double rate = (plan.weight_kg / static_cast<double>(plan.tours)) / plan.effective_capacity_kg;
  if (rate > 1.0 + 1e-9) throw ConsistencyError("tour plan overloads vehicle '" + plan.vehicle.id + "'");
  return std::min(rate, 1.0);
}

/// KPIs of a list of plans that share one parameter set.
inline KpiReport plan_kpis(std::span<const TourPlan> plans, const NetworkParams& params,
                           const ExternalCostFactors& factors) {
  KpiReport r;
  for (const auto& p : plans) {
    r.total_distance_km += p.distance_km;
    r.total_time_h += plan_time_h(p, params);
    r.loaded_weight_kg += p.weight_kg;
    r.fill_weighted_load_kg += plan_fill_rate(p) * p.weight_kg;
    r.fractional_tours += p.weight_kg / p.effective_capacity_kg;
    r.tours_by_vehicle[p.vehicle.id] += p.tours;
  }
  r.distance_cost = distance_cost(plans);
  r.time_cost = time_cost(plans, params);
  r.external_by_category = external_cost(r.total_distance_km, factors).by_category;
  return r;
}

/// Marker returned when no lead time up to 24 h admits a tour plan.
inline constexpr double kNoFeasibleLeadTime = std::numeric_limits<double>::infinity();

/// Smallest lead time on the grid {resolution, 2*resolution, ..., 24} for which
/// solve_tour_plan converges. Feasibility is monotone in lt, so this bisects.
inline double min_feasible_lead_time(const VehicleType& vehicle, const DemandProfile& demand,
                                     const NetworkParams& params, double resolution = 0.05) {
  if (!(resolution > 0.0) || resolution > 24.0)
    throw DomainError("min_feasible_lead_time: resolution must lie in (0, 24]");
  const auto steps = static_cast<std::int64_t>(std::floor(24.0 / resolution + 1e-9));
  auto lead_at = [&](std::int64_t k) {
    return k >= steps ? 24.0 : static_cast<double>(k) * resolution;
  };
  auto feasible = [&](std::int64_t k) {
    auto p = params;
    p.lead_time_h = lead_at(k);
    try {
      solve_tour_plan(vehicle, demand, p);
      return true;
    } catch (const InfeasibleError&) {
      return false;
    }
  };
  if (!feasible(steps)) return kNoFeasibleLeadTime;
  std::int64_t lo = 0;  // infeasible (or below the grid)
  std::int64_t hi = steps;
  while (hi - lo > 1) {
    const auto mid = lo + (hi - lo) / 2;
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return lead_at(hi);
}

}  // namespace urbanfreight
