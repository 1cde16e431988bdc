#pragma once

// Table / JSON / CSV rendering of scheme reports, comparisons, sweeps and
// optimization results. Output is a pure function of the input.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "urbanfreight/allocation_optimizer.hpp"
#include "urbanfreight/scheme_engine.hpp"
#include "urbanfreight/sensitivity.hpp"

namespace urbanfreight {

enum class Format { table, json, csv };

inline Format parse_format(std::string_view s) {
  if (s == "table") return Format::table;
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  throw DomainError("unknown format '" + std::string(s) + "' (table, json, csv)");
}

inline constexpr const char* kInfeasibleToken = "infeasible";

namespace detail {

using ojson = nlohmann::ordered_json;

inline std::string fixed(double x, int decimals = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  std::string s(buf);
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

inline double rounded(double x, int decimals = 2) {
  const double f = std::pow(10.0, decimals);
  const double r = std::round(x * f) / f;
  return r == 0.0 ? 0.0 : r;
}

/// Parameter values: up to 6 decimals, trailing zeros trimmed.
inline std::string param_text(double x) {
  auto s = fixed(x, 6);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

struct Grid {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string to_csv(const Grid& g) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_cell(cells[i]);
    }
    out += '\n';
  };
  line(g.header);
  for (const auto& r : g.rows) line(r);
  return out;
}

inline std::string to_table(const Grid& g) {
  std::vector<std::size_t> width(g.header.size(), 0);
  for (std::size_t i = 0; i < g.header.size(); ++i) width[i] = g.header[i].size();
  for (const auto& r : g.rows)
    for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) width[i] = std::max(width[i], r[i].size());
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += "  ";
      const auto pad = width[i] - cells[i].size();
      if (i == 0) out += cells[i] + std::string(pad, ' ');
      else out += std::string(pad, ' ') + cells[i];
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
  };
  line(g.header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out += std::string(total + 2 * (width.empty() ? 0 : width.size() - 1), '-') + '\n';
  for (const auto& r : g.rows) line(r);
  return out;
}

inline std::string tours_text(const std::map<std::string, std::int64_t>& tours) {
  std::string s;
  for (const auto& [id, n] : tours) {
    if (!s.empty()) s += ';';
    s += id + ":" + std::to_string(n);
  }
  return s;
}

inline const std::vector<std::string>& kpi_header() {
  static const std::vector<std::string> h{
      "distance_km", "time_h",   "distance_cost",  "time_cost",     "transport_cost",
      "handling_cost", "total_cost", "external_cost", "accident",   "air_pollution",
      "climate_change", "noise", "congestion",     "fill_rate",     "tours",
      "fractional_tours", "deliveries"};
  return h;
}

inline std::vector<std::string> kpi_cells(const KpiReport& k) {
  std::vector<std::string> c{fixed(k.total_distance_km), fixed(k.total_time_h),
                             fixed(k.distance_cost),     fixed(k.time_cost),
                             fixed(k.transport_cost()),  fixed(k.handling_cost),
                             fixed(k.total_cost()),      fixed(k.external_cost_total())};
  for (double e : k.external_by_category) c.push_back(fixed(e));
  c.push_back(fixed(k.fill_rate(), 4));
  c.push_back(std::to_string(k.total_tours()));
  c.push_back(fixed(k.fractional_tours));
  c.push_back(fixed(k.deliveries));
  return c;
}

inline ojson kpi_json(const KpiReport& k) {
  ojson j;
  j["distance_km"] = rounded(k.total_distance_km);
  j["time_h"] = rounded(k.total_time_h);
  j["distance_cost"] = rounded(k.distance_cost);
  j["time_cost"] = rounded(k.time_cost);
  j["transport_cost"] = rounded(k.transport_cost());
  j["handling_cost"] = rounded(k.handling_cost);
  j["total_cost"] = rounded(k.total_cost());
  j["external_cost"] = rounded(k.external_cost_total());
  ojson ext;
  for (std::size_t c = 0; c < kExternalCategories; ++c)
    ext[std::string(kExternalCategoryNames[c])] = rounded(k.external_by_category[c]);
  j["external_by_category"] = ext;
  j["fill_rate"] = rounded(k.fill_rate(), 4);
  j["tours"] = k.total_tours();
  j["fractional_tours"] = rounded(k.fractional_tours);
  j["deliveries"] = rounded(k.deliveries);
  ojson tv = ojson::object();
  for (const auto& [id, n] : k.tours_by_vehicle) tv[id] = n;
  j["tours_by_vehicle"] = tv;
  return j;
}

inline std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

}  // namespace detail

inline std::string render(const SchemeReport& r, Format f) {
  using namespace detail;
  if (f == Format::json) {
    ojson j;
    j["scheme"] = r.name;
    j["totals"] = kpi_json(r.totals);
    ojson layers = ojson::array();
    for (const auto& l : r.layers) {
      ojson lj;
      lj["layer"] = l.name;
      lj["kpis"] = kpi_json(l.kpis);
      ojson as = ojson::array();
      for (const auto& a : l.assignments) {
        as.push_back({{"label", a.label},
                      {"vehicle", a.vehicle_id},
                      {"tours", a.tours},
                      {"distance_km", rounded(a.distance_km)},
                      {"fill_rate", rounded(a.fill_rate, 4)},
                      {"binding", to_string(a.binding)}});
      }
      lj["assignments"] = as;
      layers.push_back(lj);
    }
    j["layers"] = layers;
    return dump(j);
  }
  Grid g;
  g.header = {"scope"};
  for (const auto& h : kpi_header()) g.header.push_back(h);
  auto add = [&](const std::string& scope, const KpiReport& k) {
    std::vector<std::string> row{scope};
    for (auto& c : kpi_cells(k)) row.push_back(std::move(c));
    g.rows.push_back(std::move(row));
  };
  for (const auto& l : r.layers) add(l.name, l.kpis);
  add("total", r.totals);
  if (f == Format::csv) return to_csv(g);
  std::string out = "scheme: " + r.name + "\n\n" + to_table(g);
  Grid a;
  a.header = {"layer", "assignment", "vehicle", "tours", "distance_km", "fill_rate", "binding"};
  for (const auto& l : r.layers)
    for (const auto& x : l.assignments)
      a.rows.push_back({l.name, x.label, x.vehicle_id, std::to_string(x.tours), fixed(x.distance_km),
                        fixed(x.fill_rate, 4), to_string(x.binding)});
  if (!a.rows.empty()) out += "\n" + to_table(a);
  return out;
}

inline std::string render(const ComparisonTable& t, Format f) {
  using namespace detail;
  if (f == Format::json) {
    ojson j;
    j["baseline"] = t.baseline;
    ojson rows = ojson::array();
    for (const auto& row : t.rows) {
      ojson rj;
      rj["scheme"] = row.scheme;
      rj["status"] = row.feasible() ? "ok" : kInfeasibleToken;
      if (row.feasible()) rj["kpis"] = kpi_json(row.report->totals);
      else rj["error"] = row.error;
      ojson d;
      for (std::size_t k = 0; k < kAllKpis.size(); ++k) {
        const auto& v = row.delta_pct[k];
        d[kpi_name(kAllKpis[k])] = v ? ojson(rounded(*v)) : ojson(nullptr);
      }
      rj["delta_pct"] = d;
      rows.push_back(rj);
    }
    j["rows"] = rows;
    return dump(j);
  }
  Grid g;
  g.header = {"scheme", "status"};
  for (auto k : kAllKpis) g.header.push_back(kpi_name(k));
  for (auto k : kAllKpis) g.header.push_back(std::string(kpi_name(k)) + "_delta_pct");
  for (const auto& row : t.rows) {
    std::vector<std::string> cells{row.scheme, row.feasible() ? "ok" : kInfeasibleToken};
    for (auto k : kAllKpis) {
      if (!row.feasible()) cells.push_back("");
      else if (k == Kpi::fill_rate) cells.push_back(fixed(kpi_value(row.report->totals, k), 4));
      else if (k == Kpi::tours) cells.push_back(fixed(kpi_value(row.report->totals, k), 0));
      else cells.push_back(fixed(kpi_value(row.report->totals, k)));
    }
    for (std::size_t k = 0; k < kAllKpis.size(); ++k)
      cells.push_back(row.delta_pct[k] ? fixed(*row.delta_pct[k]) : std::string{});
    g.rows.push_back(std::move(cells));
  }
  if (f == Format::csv) return to_csv(g);
  std::string out = "baseline: " + t.baseline + "\n\n" + to_table(g);
  for (const auto& row : t.rows)
    if (!row.feasible()) out += "\n" + row.scheme + ": " + row.error + "\n";
  return out;
}

inline std::string render(const SweepReport& r, Format f) {
  using namespace detail;
  if (f == Format::json) {
    ojson j;
    j["parameter"] = r.parameter;
    j["layer"] = r.layer_index + 1;
    j["detected_threshold"] = r.detected_threshold ? ojson(*r.detected_threshold) : ojson(nullptr);
    j["infeasible_below"] = r.infeasible_below ? ojson(*r.infeasible_below) : ojson(nullptr);
    j["infeasible_above"] = r.infeasible_above ? ojson(*r.infeasible_above) : ojson(nullptr);
    ojson rows = ojson::array();
    for (const auto& row : r.rows) {
      ojson rj;
      rj["value"] = row.value;
      rj["status"] = row.feasible() ? "ok" : kInfeasibleToken;
      if (row.feasible()) {
        rj["layer"] = kpi_json(*row.layer);
        rj["totals"] = kpi_json(*row.totals);
      } else {
        rj["error"] = row.error;
      }
      rows.push_back(rj);
    }
    j["rows"] = rows;
    return dump(j);
  }
  Grid g;
  g.header = {r.parameter,          "status",           "layer_tours",    "tours_by_vehicle",
              "layer_distance_km",  "layer_time_h",     "layer_transport_cost", "layer_fill_rate",
              "distance_km",        "time_h",           "transport_cost", "total_cost",
              "external_cost",      "fill_rate"};
  for (const auto& row : r.rows) {
    std::vector<std::string> c{param_text(row.value), row.feasible() ? "ok" : kInfeasibleToken};
    if (row.feasible()) {
      const auto& l = *row.layer;
      const auto& t = *row.totals;
      for (auto s : {std::to_string(l.total_tours()), tours_text(l.tours_by_vehicle),
                     fixed(l.total_distance_km), fixed(l.total_time_h), fixed(l.transport_cost()),
                     fixed(l.fill_rate(), 4), fixed(t.total_distance_km), fixed(t.total_time_h),
                     fixed(t.transport_cost()), fixed(t.total_cost()),
                     fixed(t.external_cost_total()), fixed(t.fill_rate(), 4)})
        c.push_back(s);
    } else {
      c.resize(g.header.size());
    }
    g.rows.push_back(std::move(c));
  }
  if (f == Format::csv) return to_csv(g);
  std::string out = "sweep: " + r.parameter + " on layer " + std::to_string(r.layer_index + 1) + "\n\n" +
                    to_table(g) + "\n";
  out += "threshold: " + (r.detected_threshold ? param_text(*r.detected_threshold) : "none") + "\n";
  if (r.infeasible_below) out += "infeasible at or below: " + param_text(*r.infeasible_below) + "\n";
  if (r.infeasible_above) out += "infeasible at or above: " + param_text(*r.infeasible_above) + "\n";
  return out;
}

/// Optimizer output plus the context needed to label it.
struct OptimizationReport {
  std::string scheme;
  std::size_t layer_index{0};
  OptimizationProblem problem;
  OptimizationResult result;
  std::optional<OptimizationResult> oracle;
  /// Scheme totals with the optimized layer substituted.
  std::optional<KpiReport> scheme_totals;
  bool include_trace{false};
};

inline std::string render(const OptimizationReport& r, Format f) {
  using namespace detail;
  auto methods = std::vector<std::pair<std::string, const OptimizationResult*>>{{"sa", &r.result}};
  if (r.oracle) methods.push_back({"grid", &*r.oracle});

  if (f == Format::json) {
    ojson j;
    j["scheme"] = r.scheme;
    j["layer"] = r.layer_index + 1;
    ojson vs = ojson::array();
    for (const auto& v : r.problem.fleet) vs.push_back(v.id);
    j["vehicles"] = vs;
    for (const auto& [name, res] : methods) {
      ojson m;
      ojson alloc;
      for (std::size_t u = 0; u < r.problem.units.size(); ++u) {
        ojson row;
        for (std::size_t i = 0; i < r.problem.fleet.size(); ++i)
          row[r.problem.fleet[i].id] = rounded(res->allocation(u, i), 4);
        alloc[r.problem.units[u].id] = row;
      }
      m["allocation"] = alloc;
      m["objective"] = rounded(res->objective);
      m["feasible"] = res->feasible;
      m["evaluations"] = res->evaluations;
      ojson viol = ojson::array();
      for (const auto& s : res->violations)
        viol.push_back({{"vehicle", s.vehicle_id},
                        {"capacity", rounded(s.capacity)},
                        {"shift", rounded(s.shift)},
                        {"lead_time", rounded(s.lead_time)},
                        {"diverged", s.diverged}});
      m["violations"] = viol;
      m["kpis"] = kpi_json(res->kpis);
      if (name == "sa" && r.include_trace) {
        ojson tr = ojson::array();
        for (double x : res->trace) tr.push_back(rounded(x));
        m["trace"] = tr;
      }
      j[name] = m;
    }
    if (r.scheme_totals) j["scheme_totals"] = kpi_json(*r.scheme_totals);
    return dump(j);
  }

  Grid g;
  g.header = {"method", "unit", "vehicle", "share", "integral_stops"};
  for (const auto& [name, res] : methods)
    for (std::size_t u = 0; u < r.problem.units.size(); ++u)
      for (std::size_t i = 0; i < r.problem.fleet.size(); ++i)
        g.rows.push_back({name, r.problem.units[u].id, r.problem.fleet[i].id,
                          fixed(res->allocation(u, i), 4), std::to_string(res->integral_stops[u][i])});
  if (f == Format::csv) return to_csv(g);

  std::string out = "optimize: scheme " + r.scheme + ", layer " + std::to_string(r.layer_index + 1) +
                    "\n\n" + to_table(g) + "\n";
  Grid s;
  s.header = {"method", "objective", "feasible", "evaluations"};
  for (const auto& h : kpi_header()) s.header.push_back(h);
  for (const auto& [name, res] : methods) {
    std::vector<std::string> row{name, fixed(res->objective), res->feasible ? "yes" : "no",
                                 std::to_string(res->evaluations)};
    for (auto& c : kpi_cells(res->kpis)) row.push_back(std::move(c));
    s.rows.push_back(std::move(row));
  }
  out += to_table(s) + "\n";
  Grid v;
  v.header = {"method", "vehicle", "capacity_slack", "shift_slack", "lead_time_slack", "diverged"};
  for (const auto& [name, res] : methods)
    for (const auto& x : res->violations)
      v.rows.push_back({name, x.vehicle_id, fixed(x.capacity), fixed(x.shift), fixed(x.lead_time),
                        x.diverged ? "yes" : "no"});
  out += to_table(v);
  if (r.scheme_totals) {
    Grid t;
    t.header = {"scope"};
    for (const auto& h : kpi_header()) t.header.push_back(h);
    std::vector<std::string> row{"scheme"};
    for (auto& c : kpi_cells(*r.scheme_totals)) row.push_back(std::move(c));
    t.rows.push_back(std::move(row));
    out += "\n" + to_table(t);
  }
  if (r.include_trace) {
    out += "\ntrace:";
    for (double x : r.result.trace) out += " " + fixed(x);
    out += "\n";
  }
  return out;
}

/// Writes to `path`, or to stdout when path is empty or "-".
inline void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace urbanfreight
