#pragma once

// One-dimensional parameter sweeps over a single layer of a scheme, with
// tour-count threshold detection and infeasibility boundaries.

#include <cmath>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "urbanfreight/scheme_engine.hpp"

namespace urbanfreight {

inline constexpr std::array<std::string_view, 8> kSweepParameters = {
    "radius_km",        "area_km2",    "daganzo_k", "congestion_factor", "stop_time_h",
    "shift_duration_h", "lead_time_h", "speed_kmh"};

inline bool is_sweep_parameter(std::string_view name) {
  return std::find(kSweepParameters.begin(), kSweepParameters.end(), name) !=
         kSweepParameters.end();
}

/// Whether larger values of the parameter relax the model (more time, faster vehicles).
inline bool slack_is_high(std::string_view name) {
  return name == "lead_time_h" || name == "shift_duration_h" || name == "speed_kmh";
}

/// Sets `name` on one layer; speed_kmh applies to every vehicle of the layer.
inline void set_parameter(LayerSpec& layer, std::string_view name, double value) {
  auto& p = layer.params;
  if (name == "radius_km") p.radius_km = value;
  else if (name == "area_km2") p.area_km2 = value;
  else if (name == "daganzo_k") p.daganzo_k = value;
  else if (name == "congestion_factor") p.congestion_factor = value;
  else if (name == "stop_time_h") p.stop_time_h = value;
  else if (name == "shift_duration_h") p.shift_duration_h = value;
  else if (name == "lead_time_h") p.lead_time_h = value;
  else if (name == "speed_kmh") {
    for (auto& a : layer.fleet) a.vehicle.speed_kmh = value;
  } else {
    throw DomainError("unknown sweep parameter '" + std::string(name) + "'");
  }
}

struct SweepSpec {
  std::string parameter;
  double start{0.0};
  double stop{0.0};
  double step{1.0};
  SchemeSpec target;
  /// Zero-based index of the layer the parameter applies to.
  std::size_t layer_index{0};

  void validate() const {
    if (!is_sweep_parameter(parameter))
      throw DomainError("unknown sweep parameter '" + parameter + "'");
    if (!(step > 0.0)) throw DomainError("sweep step must be > 0");
    if (!(start <= stop)) throw DomainError("empty sweep grid: start > stop");
    if (layer_index >= target.layers.size())
      throw DomainError("sweep layer " + std::to_string(layer_index + 1) + " out of range (scheme '" +
                        target.name + "' has " + std::to_string(target.layers.size()) + " layers)");
  }

  /// Closed grid start, start+step, ...; the last point snaps to stop.
  std::vector<double> grid() const {
    validate();
    const auto count = static_cast<std::int64_t>(std::llround((stop - start) / step));
    std::vector<double> out;
    for (std::int64_t k = 0; k <= count; ++k) out.push_back(start + static_cast<double>(k) * step);
    if (count > 0) out.back() = stop;
    return out;
  }

  SchemeSpec at(double value) const {
    auto s = target;
    set_parameter(s.layers[layer_index], parameter, value);
    return s;
  }
};

struct SweepRow {
  double value{0.0};
  /// Absent when the point is infeasible.
  std::optional<KpiReport> totals;
  std::optional<KpiReport> layer;
  std::string error;

  bool feasible() const { return totals.has_value(); }
};

struct SweepReport {
  std::string parameter;
  std::size_t layer_index{0};
  bool slack_high{false};
  std::vector<SweepRow> rows;
  std::optional<double> detected_threshold;
  /// Tight-side boundary: every point at or beyond it (in the tight direction) is infeasible.
  std::optional<double> infeasible_below;
  std::optional<double> infeasible_above;
};

/// Rows in scan order: slack end first.
inline std::vector<const SweepRow*> scan_order(const SweepReport& r) {
  std::vector<const SweepRow*> out;
  for (const auto& row : r.rows) out.push_back(&row);
  if (r.slack_high) std::reverse(out.begin(), out.end());
  return out;
}

/// First value in scan order whose per-vehicle tours of the swept layer
/// differ from the slack end. Infeasible rows are skipped.
inline std::optional<double> detect_threshold(const SweepReport& report) {
  const std::map<std::string, std::int64_t>* reference = nullptr;
  for (const auto* row : scan_order(report)) {
    if (!row->feasible()) continue;
    if (!reference) {
      reference = &row->layer->tours_by_vehicle;
      continue;
    }
    if (row->layer->tours_by_vehicle != *reference) return row->value;
  }
  return std::nullopt;
}

/// True when every point on the tight side of an infeasible point is infeasible.
inline bool infeasibility_monotone(const SweepReport& report) {
  bool seen = false;
  for (const auto* row : scan_order(report)) {
    if (!row->feasible()) seen = true;
    else if (seen) return false;
  }
  return true;
}

inline SweepReport sweep_parameter(const SweepSpec& spec) {
  const auto values = spec.grid();
  SweepReport report;
  report.parameter = spec.parameter;
  report.layer_index = spec.layer_index;
  report.slack_high = slack_is_high(spec.parameter);

  auto point = [&spec](double v) {
    SweepRow row;
    row.value = v;
    try {
      auto r = evaluate_scheme(spec.at(v));
      row.layer = r.layers[spec.layer_index].kpis;
      row.totals = r.totals;
    } catch (const InfeasibleError& e) {
      row.error = e.what();
    }
    return row;
  };
  const std::size_t batch = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t first = 0; first < values.size(); first += batch) {
    std::vector<std::future<SweepRow>> jobs;
    for (std::size_t k = first; k < std::min(values.size(), first + batch); ++k)
      jobs.push_back(std::async(std::launch::async, point, values[k]));
    for (auto& j : jobs) report.rows.push_back(j.get());
  }

  report.detected_threshold = detect_threshold(report);
  // Boundary: the infeasible point nearest the slack end.
  for (const auto* row : scan_order(report)) {
    if (row->feasible()) continue;
    if (report.slack_high) report.infeasible_below = row->value;
    else report.infeasible_above = row->value;
    break;
  }
  return report;
}

/// Wraps a (fleet, demand, params) triple as a one-layer scheme.
inline SchemeSpec make_single_layer_scheme(const std::string& name, const VehicleType& vehicle,
                                           const DemandProfile& demand, const NetworkParams& params,
                                           const ExternalCostFactors& factors = {}) {
  LayerSpec layer;
  layer.name = name;
  layer.mode = LayerMode::analytical;
  layer.params = params;
  layer.fleet.push_back({vehicle.id, vehicle, demand, {1.0}});
  return SchemeSpec{name, {layer}, factors};
}

}  // namespace urbanfreight
