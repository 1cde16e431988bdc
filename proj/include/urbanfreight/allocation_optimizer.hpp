#pragma once

// Allocation of delivery-unit types to vehicle types (np_ji) minimising
// transport cost: simulated annealing plus an exhaustive simplex-grid oracle.

#include <cmath>
#include <cstdint>
#include <future>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "urbanfreight/core_model.hpp"
#include "urbanfreight/scheme_engine.hpp"

namespace urbanfreight {

/// Row j = delivery-unit type, column i = vehicle type.
class AllocationMatrix {
 public:
  AllocationMatrix() = default;
  AllocationMatrix(std::size_t units, std::size_t vehicles)
      : units_(units), vehicles_(vehicles), data_(units * vehicles, 0.0) {}

  static AllocationMatrix uniform(std::size_t units, std::size_t vehicles) {
    AllocationMatrix a(units, vehicles);
    for (auto& x : a.data_) x = 1.0 / static_cast<double>(vehicles);
    return a;
  }

  static AllocationMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw DomainError("allocation needs at least one row");
    AllocationMatrix a(rows.size(), rows.front().size());
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (rows[j].size() != a.vehicles_) throw DomainError("allocation rows differ in length");
      for (std::size_t i = 0; i < a.vehicles_; ++i) a.at(j, i) = rows[j][i];
    }
    a.validate();
    return a;
  }

  std::size_t units() const { return units_; }
  std::size_t vehicles() const { return vehicles_; }
  double operator()(std::size_t j, std::size_t i) const { return data_[j * vehicles_ + i]; }
  double& at(std::size_t j, std::size_t i) { return data_[j * vehicles_ + i]; }

  double row_sum(std::size_t j) const {
    std::vector<double> row(data_.begin() + static_cast<std::ptrdiff_t>(j * vehicles_),
                            data_.begin() + static_cast<std::ptrdiff_t>((j + 1) * vehicles_));
    return exact_sum(row);
  }

  /// Mass of column i summed over rows, divided by the row count.
  double column_share(std::size_t i) const {
    double s = 0.0;
    for (std::size_t j = 0; j < units_; ++j) s += (*this)(j, i);
    return units_ ? s / static_cast<double>(units_) : 0.0;
  }

  /// Entries in [0, 1] and every row summing to 1.
  void validate() const {
    if (units_ == 0 || vehicles_ == 0) throw DomainError("allocation matrix is empty");
    for (std::size_t j = 0; j < units_; ++j) {
      for (std::size_t i = 0; i < vehicles_; ++i) {
        const double x = (*this)(j, i);
        if (!(x >= 0.0 && x <= 1.0))
          throw DomainError("allocation entry (" + std::to_string(j) + ", " + std::to_string(i) +
                            ") = " + std::to_string(x) + " outside [0, 1]");
      }
      const double s = row_sum(j);
      if (std::abs(s - 1.0) > 1e-9)
        throw DomainError("allocation row " + std::to_string(j) + " sums to " + std::to_string(s) +
                          "; each unit type's shares must sum to 1");
    }
  }

  bool operator==(const AllocationMatrix&) const = default;

 private:
  std::size_t units_{0};
  std::size_t vehicles_{0};
  std::vector<double> data_;
};

struct SaConfig {
  std::uint64_t seed{1};
  /// Default: 10% of the starting objective.
  std::optional<double> initial_temperature;
  double cooling_rate{0.95};
  int steps_per_temperature{200};
  /// Default: 1e-4 times the initial temperature.
  std::optional<double> min_temperature;
  int restarts{5};
  double penalty_weight{1000.0};
  double grid_step{0.05};

  void validate() const {
    if (initial_temperature && !(*initial_temperature > 0.0))
      throw DomainError("initial_temperature must be > 0");
    if (!(cooling_rate > 0.0 && cooling_rate < 1.0))
      throw DomainError("cooling_rate must lie in (0, 1)");
    if (steps_per_temperature < 1) throw DomainError("steps_per_temperature must be >= 1");
    if (min_temperature && !(*min_temperature > 0.0))
      throw DomainError("min_temperature must be > 0");
    if (restarts < 1) throw DomainError("restarts must be >= 1");
    if (!(penalty_weight > 0.0)) throw DomainError("penalty_weight must be > 0");
    if (!(grid_step > 0.0 && grid_step <= 1.0)) throw DomainError("grid_step must lie in (0, 1]");
  }

  bool operator==(const SaConfig&) const = default;
};

/// Fleet, unit rows and geometry of one allocation problem. Subregions work as
/// in layer evaluation: one of n subregions is costed and multiplied by n.
struct OptimizationProblem {
  std::vector<VehicleType> fleet;
  std::vector<DeliveryUnitType> units;
  NetworkParams params;
  int subregion_count{1};
  /// Only used to report external cost of the result.
  ExternalCostFactors external_factors;

  void validate() const {
    if (fleet.empty()) throw DomainError("optimization needs at least one vehicle type");
    if (units.empty()) throw DomainError("optimization needs at least one delivery unit type");
    for (const auto& v : fleet) v.validate();
    for (const auto& u : units) u.validate();
    params.validate();
    if (subregion_count < 1) throw DomainError("subregion_count must be >= 1");
  }
};

/// Signed slacks of one vehicle column, positive = violated.
struct VehicleSlack {
  std::string vehicle_id;
  double capacity{0.0};
  double shift{0.0};
  double lead_time{0.0};
  /// The tour-count iteration has no fixed point for this column.
  bool diverged{false};

  double excess() const {
    return std::max(0.0, capacity) + std::max(0.0, shift) + std::max(0.0, lead_time);
  }
};

struct OptimizationResult {
  AllocationMatrix allocation;
  double objective{0.0};
  bool feasible{false};
  std::vector<VehicleSlack> violations;
  KpiReport kpis;
  /// Best energy so far, one entry per temperature level of the winning restart.
  std::vector<double> trace;
  std::int64_t evaluations{0};
  /// Stops per cell after largest-remainder rounding of each row.
  std::vector<std::vector<std::int64_t>> integral_stops;
};

/// Demand each vehicle receives under `allocation`.
inline std::vector<DemandProfile> induced_demand(const AllocationMatrix& allocation,
                                                 const std::vector<DeliveryUnitType>& units) {
  if (allocation.units() != units.size())
    throw DomainError("allocation has " + std::to_string(allocation.units()) + " rows for " +
                      std::to_string(units.size()) + " unit types");
  allocation.validate();
  std::vector<DemandProfile> out;
  out.reserve(allocation.vehicles());
  for (std::size_t i = 0; i < allocation.vehicles(); ++i) {
    std::vector<DeliveryUnitType> rows;
    for (std::size_t j = 0; j < units.size(); ++j) {
      const double np = allocation(j, i);
      if (np <= 0.0) continue;
      auto u = units[j];
      u.stops *= np;
      rows.push_back(std::move(u));
    }
    out.push_back(DemandProfile::from_units(std::move(rows)));
  }
  return out;
}

namespace detail {

struct ColumnEval {
  double distance_cost{0.0};
  double time_cost{0.0};
  VehicleSlack slack;
  TourPlan plan;
};

/// Cost and slacks of one vehicle serving one subregion's share of `demand`.
inline ColumnEval evaluate_column(const VehicleType& vehicle, const DemandProfile& demand,
                                  const OptimizationProblem& pb) {
  auto p = pb.params;
  const int n = pb.subregion_count;
  p.area_km2 /= n;
  const auto sub = n == 1 ? demand : demand.scaled(1.0 / n);

  ColumnEval out;
  out.slack.vehicle_id = vehicle.id;
  if (sub.empty()) {
    out.plan.vehicle = vehicle;
    return out;
  }
  try {
    out.plan = solve_tour_plan(vehicle, sub, p);
  } catch (const InfeasibleError&) {
    // Cost the capacity-only tour count; the slacks below carry the violation.
    out.slack.diverged = true;
    out.plan.vehicle = vehicle;
    out.plan.weight_kg = sub.total_weight_kg();
    out.plan.stops = sub.total_stops();
    out.plan.effective_capacity_kg = effective_capacity(vehicle, sub);
    out.plan.tours = std::max<std::int64_t>(
        1, ceil_count(out.plan.weight_kg / out.plan.effective_capacity_kg));
    out.plan.distance_km = route_distance(out.plan.tours, out.plan.stops, p);
  }
  const auto& pl = out.plan;
  const double m = static_cast<double>(pl.tours);
  const double speed = p.effective_speed(vehicle);
  const double time = plan_time_h(pl, p);
  out.slack.capacity = pl.weight_kg - m * pl.effective_capacity_kg;
  out.slack.shift = time - m * p.shift_duration_h;
  out.slack.lead_time = (pl.distance_km - p.radius_km * m) / speed + p.stop_time_h * pl.stops -
                        m * p.lead_time_h;
  if (out.slack.diverged) {
    const double lead_eq1 = (pl.distance_km - p.radius_km) / speed +
                            p.stop_time_h * (pl.stops - 1.0) - m * p.lead_time_h;
    out.slack.lead_time = std::max({out.slack.lead_time, lead_eq1, 1.0});
  }
  const std::array<TourPlan, 1> one{pl};
  out.distance_cost = distance_cost(one) * n;
  out.time_cost = time_cost(one, p) * n;
  return out;
}

struct AllocationEval {
  double objective{0.0};
  double excess{0.0};
  bool feasible{true};
  std::vector<ColumnEval> columns;
};

inline AllocationEval score_allocation(const AllocationMatrix& allocation,
                                          const OptimizationProblem& pb) {
  const auto demands = induced_demand(allocation, pb.units);
  AllocationEval e;
  std::vector<double> costs;
  for (std::size_t i = 0; i < pb.fleet.size(); ++i) {
    auto c = evaluate_column(pb.fleet[i], demands[i], pb);
    costs.push_back(c.distance_cost);
    costs.push_back(c.time_cost);
    e.excess += c.slack.excess();
    e.feasible = e.feasible && !c.slack.diverged && c.slack.excess() <= 1e-6;
    e.columns.push_back(std::move(c));
  }
  e.objective = exact_sum(costs);
  return e;
}

/// Ranking used by both search methods: feasible before infeasible, then
/// objective (feasible) or total violation (infeasible).
inline bool better(bool feasible_a, double obj_a, double excess_a, bool feasible_b, double obj_b,
                   double excess_b) {
  if (feasible_a != feasible_b) return feasible_a;
  if (feasible_a) return obj_a < obj_b;
  if (excess_a != excess_b) return excess_a < excess_b;
  return obj_a < obj_b;
}

inline std::vector<std::vector<std::int64_t>> round_stops(const AllocationMatrix& a,
                                                          const std::vector<DeliveryUnitType>& units) {
  std::vector<std::vector<std::int64_t>> out(a.units(), std::vector<std::int64_t>(a.vehicles(), 0));
  for (std::size_t j = 0; j < a.units(); ++j) {
    const auto total = static_cast<std::int64_t>(std::llround(units[j].stops));
    std::vector<std::pair<double, std::size_t>> rem;
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < a.vehicles(); ++i) {
      const double x = static_cast<double>(total) * a(j, i);
      out[j][i] = static_cast<std::int64_t>(std::floor(x));
      assigned += out[j][i];
      rem.push_back({-(x - std::floor(x)), i});
    }
    std::sort(rem.begin(), rem.end());
    for (std::size_t k = 0; assigned < total && k < rem.size(); ++k, ++assigned) ++out[j][rem[k].second];
  }
  return out;
}

inline OptimizationResult make_result(const AllocationMatrix& allocation,
                                      const OptimizationProblem& pb) {
  const auto e = score_allocation(allocation, pb);
  OptimizationResult r;
  r.allocation = allocation;
  r.objective = e.objective;
  r.feasible = e.feasible;
  auto p = pb.params;
  p.area_km2 /= pb.subregion_count;
  std::vector<TourPlan> plans;
  for (const auto& c : e.columns) {
    r.violations.push_back(c.slack);
    plans.push_back(c.plan);
  }
  KpiReport k;
  for (const auto& pl : plans) {
    const std::array<TourPlan, 1> one{pl};
    k.deliveries += pl.stops;
    if (pl.tours == 0 && pl.weight_kg == 0.0) continue;
    auto part = plan_kpis(one, p, pb.external_factors);
    k += part;
  }
  r.kpis = pb.subregion_count == 1 ? k : k.scaled(pb.subregion_count);
  r.integral_stops = round_stops(allocation, pb.units);
  return r;
}

}  // namespace detail

/// Transport cost (distance plus time) of an allocation. Columns whose tour
/// count diverges are costed at their capacity-bound tour count.
inline double objective_value(const AllocationMatrix& allocation, const OptimizationProblem& pb) {
  return detail::score_allocation(allocation, pb).objective;
}

inline std::vector<VehicleSlack> constraint_violations(const AllocationMatrix& allocation,
                                                       const OptimizationProblem& pb) {
  std::vector<VehicleSlack> out;
  for (auto& c : detail::score_allocation(allocation, pb).columns) out.push_back(c.slack);
  return out;
}

/// Full result record (objective, slacks, KPIs) for a given allocation.
inline OptimizationResult evaluate_allocation(const AllocationMatrix& allocation,
                                              const OptimizationProblem& pb) {
  pb.validate();
  auto r = detail::make_result(allocation, pb);
  r.evaluations = 1;
  return r;
}

/// Moves `delta` of row j from column `from` to column `to`, clamps and renormalises.
inline AllocationMatrix transfer(const AllocationMatrix& a, std::size_t j, std::size_t from,
                                 std::size_t to, double delta) {
  AllocationMatrix out = a;
  out.at(j, from) = std::clamp(out(j, from) - delta, 0.0, 1.0);
  out.at(j, to) = std::clamp(out(j, to) + delta, 0.0, 1.0);
  const double s = out.row_sum(j);
  for (std::size_t i = 0; i < out.vehicles(); ++i) out.at(j, i) /= s;
  return out;
}

template <typename Rng>
AllocationMatrix neighbor_move(const AllocationMatrix& a, Rng& rng) {
  if (a.vehicles() < 2) return a;
  std::uniform_int_distribution<std::size_t> pick_row(0, a.units() - 1);
  std::uniform_int_distribution<std::size_t> pick_col(0, a.vehicles() - 1);
  std::uniform_int_distribution<std::size_t> pick_other(0, a.vehicles() - 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto j = pick_row(rng);
  const auto from = pick_col(rng);
  auto to = pick_other(rng);
  if (to >= from) ++to;
  const double delta = 0.2 * (1.0 - unit(rng));
  return transfer(a, j, from, to, delta);
}

namespace detail {

struct RestartOutcome {
  AllocationMatrix best;
  double objective{0.0};
  double excess{0.0};
  bool feasible{false};
  std::vector<double> trace;
  std::int64_t evaluations{0};
};

inline RestartOutcome anneal(const OptimizationProblem& pb, const SaConfig& cfg,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto energy = [&](const AllocationEval& e) { return e.objective + cfg.penalty_weight * e.excess; };

  auto x = AllocationMatrix::uniform(pb.units.size(), pb.fleet.size());
  auto ex = score_allocation(x, pb);
  double E = energy(ex);

  RestartOutcome out{x, ex.objective, ex.excess, ex.feasible, {}, 1};
  double best_energy = E;

  const double t0 = cfg.initial_temperature.value_or(0.1 * ex.objective);
  if (!(t0 > 0.0)) {
    out.trace.push_back(best_energy);
    return out;
  }
  const double t_min = cfg.min_temperature.value_or(1e-4 * t0);
  for (double T = t0; T > t_min; T *= cfg.cooling_rate) {
    for (int s = 0; s < cfg.steps_per_temperature; ++s) {
      auto y = neighbor_move(x, rng);
      auto ey = score_allocation(y, pb);
      ++out.evaluations;
      const double Ey = energy(ey);
      const double d = Ey - E;
      if (d <= 0.0 || unit(rng) < std::exp(-d / T)) {
        if (better(ey.feasible, ey.objective, ey.excess, out.feasible, out.objective, out.excess)) {
          out.best = y;
          out.objective = ey.objective;
          out.excess = ey.excess;
          out.feasible = ey.feasible;
        }
        best_energy = std::min(best_energy, Ey);
        x = std::move(y);
        E = Ey;
      }
    }
    out.trace.push_back(best_energy);
  }
  return out;
}

}  // namespace detail

/// Simulated annealing from the row-uniform allocation; restarts run
/// concurrently with seeds seed, seed+1, ... and the lowest index wins ties.
inline OptimizationResult simulated_annealing(const OptimizationProblem& pb,
                                              const SaConfig& config = {}) {
  pb.validate();
  config.validate();
  if (pb.fleet.size() == 1) {
    auto r = detail::make_result(AllocationMatrix::uniform(pb.units.size(), 1), pb);
    r.evaluations = 1;
    r.trace = {r.objective};
    return r;
  }

  std::vector<std::future<detail::RestartOutcome>> jobs;
  for (int k = 0; k < config.restarts; ++k) {
    jobs.push_back(std::async(std::launch::async, detail::anneal, std::cref(pb), std::cref(config),
                              config.seed + static_cast<std::uint64_t>(k)));
  }
  std::vector<detail::RestartOutcome> outcomes;
  for (auto& j : jobs) outcomes.push_back(j.get());

  std::size_t win = 0;
  std::int64_t evaluations = 0;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    evaluations += outcomes[k].evaluations;
    const auto& a = outcomes[k];
    const auto& b = outcomes[win];
    if (detail::better(a.feasible, a.objective, a.excess, b.feasible, b.objective, b.excess)) win = k;
  }
  auto r = detail::make_result(outcomes[win].best, pb);
  r.trace = std::move(outcomes[win].trace);
  r.evaluations = evaluations;
  return r;
}

inline constexpr double kGridPointLimit = 5e7;

/// Number of points of the simplex grid with the given step.
inline double grid_size(std::size_t vehicles, std::size_t units, double step) {
  const double n = std::round(1.0 / step);
  // compositions of n into `vehicles` parts: C(n + V - 1, V - 1)
  double row = 1.0;
  for (std::size_t k = 1; k < vehicles; ++k) row = row * (n + static_cast<double>(k)) / static_cast<double>(k);
  return std::pow(row, static_cast<double>(units));
}

/// Exhaustive search over every allocation whose entries are multiples of
/// `step`. Ties resolve to the lexicographically smallest matrix.
inline OptimizationResult brute_force_grid(const OptimizationProblem& pb, double step) {
  pb.validate();
  if (!(step > 0.0 && step <= 1.0)) throw DomainError("grid step must lie in (0, 1]");
  const auto n = static_cast<int>(std::llround(1.0 / step));
  if (std::abs(n * step - 1.0) > 1e-9)
    throw DomainError("grid step must divide 1 exactly (got " + std::to_string(step) + ")");
  const std::size_t V = pb.fleet.size();
  const std::size_t J = pb.units.size();
  const double size = grid_size(V, J, step);
  if (size > kGridPointLimit) {
    throw DomainError("grid of " + std::to_string(size) + " points exceeds the limit of " +
                      std::to_string(static_cast<std::int64_t>(kGridPointLimit)));
  }

  // Row compositions in ascending lexicographic order.
  std::vector<std::vector<int>> rows;
  std::vector<int> cur(V, 0);
  auto gen = [&](auto&& self, std::size_t pos, int left) -> void {
    if (pos + 1 == V) {
      cur[pos] = left;
      rows.push_back(cur);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      cur[pos] = k;
      self(self, pos + 1, left - k);
    }
  };
  gen(gen, 0, n);

  // Each vehicle's cost depends only on its own column: memoise per column.
  struct Cell {
    double objective;
    double excess;
    bool feasible;
  };
  std::vector<std::unordered_map<std::uint64_t, Cell>> memo(V);
  auto column = [&](std::size_t i, const std::vector<std::size_t>& pick) -> const Cell& {
    std::uint64_t key = 0;
    for (std::size_t j = 0; j < J; ++j)
      key = key * static_cast<std::uint64_t>(n + 1) + static_cast<std::uint64_t>(rows[pick[j]][i]);
    auto it = memo[i].find(key);
    if (it != memo[i].end()) return it->second;
    std::vector<DeliveryUnitType> units;
    for (std::size_t j = 0; j < J; ++j) {
      const int k = rows[pick[j]][i];
      if (k == 0) continue;
      auto u = pb.units[j];
      u.stops *= static_cast<double>(k) / n;
      units.push_back(std::move(u));
    }
    const auto c = detail::evaluate_column(pb.fleet[i], DemandProfile::from_units(std::move(units)), pb);
    const Cell cell{c.distance_cost + c.time_cost, c.slack.excess(),
                    !c.slack.diverged && c.slack.excess() <= 1e-6};
    return memo[i].emplace(key, cell).first->second;
  };

  std::vector<std::size_t> pick(J, 0);
  std::vector<std::size_t> best_pick = pick;
  Cell best{0.0, 0.0, false};
  bool have = false;
  std::int64_t evaluations = 0;
  while (true) {
    Cell total{0.0, 0.0, true};
    for (std::size_t i = 0; i < V; ++i) {
      const auto& c = column(i, pick);
      total.objective += c.objective;
      total.excess += c.excess;
      total.feasible = total.feasible && c.feasible;
    }
    ++evaluations;
    if (!have || detail::better(total.feasible, total.objective, total.excess, best.feasible,
                                best.objective, best.excess)) {
      best = total;
      best_pick = pick;
      have = true;
    }
    // odometer, last row fastest
    std::size_t j = J;
    while (j > 0) {
      --j;
      if (++pick[j] < rows.size()) break;
      pick[j] = 0;
      if (j == 0) {
        j = J + 1;
        break;
      }
    }
    if (j == J + 1) break;
  }

  AllocationMatrix a(J, V);
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t i = 0; i < V; ++i) a.at(j, i) = static_cast<double>(rows[best_pick[j]][i]) / n;
  auto r = detail::make_result(a, pb);
  r.evaluations = evaluations;
  return r;
}

// ---------------------------------------------------------------------------
// Layer plumbing
// ---------------------------------------------------------------------------

/// Merges units sharing an id across temperature classes: stops add up,
/// avg weight is the stop-weighted mean.
inline std::vector<DeliveryUnitType> pool_units(const DemandProfile& demand) {
  std::vector<DeliveryUnitType> out;
  for (const auto& u : demand.units()) {
    if (u.stops <= 0.0) continue;
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& o) { return o.id == u.id; });
    if (it == out.end()) {
      auto p = u;
      p.avg_weight_kg = u.total_weight_kg();
      p.temperature_class = TemperatureClass::A;
      out.push_back(std::move(p));
    } else {
      it->avg_weight_kg += u.total_weight_kg();
      it->stops += u.stops;
      if (u.position_weight_kg)
        it->position_weight_kg = std::max(it->position_weight_kg.value_or(0.0), *u.position_weight_kg);
    }
  }
  for (auto& u : out) u.avg_weight_kg /= u.stops;
  return out;
}

/// Allocation problem over every unit entering an analytical layer. Candidate
/// vehicles take the layer's operating speed when its fleet runs at one speed.
inline OptimizationProblem problem_from_layer(const LayerSpec& layer,
                                              std::vector<VehicleType> candidates,
                                              const ExternalCostFactors& factors = {}) {
  if (layer.mode != LayerMode::analytical)
    throw DomainError("layer '" + layer.name + "' is a fixed shuttle layer; nothing to allocate");
  DemandProfile all;
  for (const auto& a : layer.fleet) all = all.merged(a.demand);
  if (!layer.fleet.empty()) {
    const double v = layer.fleet.front().vehicle.speed_kmh;
    const bool one_speed = std::all_of(layer.fleet.begin(), layer.fleet.end(),
                                       [&](const auto& a) { return a.vehicle.speed_kmh == v; });
    if (one_speed)
      for (auto& c : candidates) c.speed_kmh = v;
  }
  OptimizationProblem pb{std::move(candidates), pool_units(all), layer.params,
                         layer.subregion_count, factors};
  pb.validate();
  return pb;
}

/// The layer with its fleet replaced by the allocation's induced demands.
inline LayerSpec apply_allocation(const LayerSpec& layer, const OptimizationProblem& pb,
                                  const AllocationMatrix& allocation) {
  auto out = layer;
  out.fleet.clear();
  const auto demands = induced_demand(allocation, pb.units);
  for (std::size_t i = 0; i < pb.fleet.size(); ++i) {
    if (demands[i].empty()) continue;
    out.fleet.push_back({pb.fleet[i].id, pb.fleet[i], demands[i], {1.0}});
  }
  return out;
}

inline SchemeSpec with_layer(SchemeSpec scheme, std::size_t index, LayerSpec layer) {
  if (index >= scheme.layers.size()) throw DomainError("layer index out of range");
  scheme.layers[index] = std::move(layer);
  return scheme;
}

}  // namespace urbanfreight
