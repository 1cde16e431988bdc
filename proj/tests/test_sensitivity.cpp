#include <gtest/gtest.h>

#include "urbanfreight/urbanfreight.hpp"

using namespace urbanfreight;

namespace {

const Scenario& bordeaux() {
  static const Scenario sc = load_scenario(UF_DATA_DIR "/bordeaux.scenario");
  return sc;
}

SweepRow row(double v, std::int64_t tours) {
  KpiReport k;
  k.tours_by_vehicle["x"] = tours;
  return {v, k, k, {}};
}

SweepRow infeasible(double v) { return {v, std::nullopt, std::nullopt, "infeasible"}; }

// the lead-time bound instance: every added tour costs a 3 h round trip
SchemeSpec lead_bound() {
  NetworkParams p;
  p.radius_km = 30;
  p.area_km2 = 186;
  p.stop_time_h = 0.25;
  p.shift_duration_h = 24;
  p.lead_time_h = 4;
  const VehicleType v{"t25", 25000, 20, 5, 30, TemperatureClass::A, 68};
  return make_single_layer_scheme("lead", v, DemandProfile::aggregate(5000, 10), p,
                                  ExternalCostFactors::reference());
}

}  // namespace

TEST(Grid, ClosedWithSnappedEnd) {
  SweepSpec s{"lead_time_h", 3, 8, 0.5, lead_bound(), 0};
  const auto g = s.grid();
  ASSERT_EQ(g.size(), 11u);
  EXPECT_EQ(g.front(), 3.0);
  EXPECT_EQ(g.back(), 8.0);
  s.start = s.stop = 5;
  EXPECT_EQ(s.grid(), std::vector<double>{5.0});
}

TEST(Grid, Rejects) {
  EXPECT_THROW((SweepSpec{"lead_time_h", 8, 3, 0.5, lead_bound(), 0}.grid()), DomainError);
  EXPECT_THROW((SweepSpec{"lead_time_h", 3, 8, 0, lead_bound(), 0}.grid()), DomainError);
  EXPECT_THROW((SweepSpec{"colour", 3, 8, 1, lead_bound(), 0}.grid()), DomainError);
  EXPECT_THROW((SweepSpec{"lead_time_h", 3, 8, 1, lead_bound(), 3}.grid()), DomainError);
}

TEST(Threshold, ConstantReportHasNone) {
  SweepReport r;
  r.slack_high = true;
  for (double v : {4, 5, 6, 7, 8}) r.rows.push_back(row(v, 2));
  EXPECT_FALSE(detect_threshold(r).has_value());
}

TEST(Threshold, FirstChangeFromSlackEnd) {
  SweepReport r;
  r.slack_high = true;
  const std::vector<std::int64_t> tours{3, 3, 2, 2, 2};
  for (int k = 0; k < 5; ++k) r.rows.push_back(row(4 + k, tours[k]));
  ASSERT_TRUE(detect_threshold(r).has_value());
  EXPECT_EQ(*detect_threshold(r), 5.0);
}

TEST(Threshold, AllInfeasible) {
  SweepReport r;
  r.slack_high = true;
  for (double v : {1, 2, 3}) r.rows.push_back(infeasible(v));
  EXPECT_FALSE(detect_threshold(r).has_value());
  EXPECT_TRUE(infeasibility_monotone(r));
}

TEST(Threshold, NonMonotoneInfeasibility) {
  SweepReport r;
  r.slack_high = true;
  r.rows = {row(1, 5), infeasible(2), row(3, 2)};
  EXPECT_FALSE(infeasibility_monotone(r));
}

TEST(Sweep, LeadTimeShape) {
  const auto r = sweep_parameter({"lead_time_h", 1, 8, 0.25, lead_bound(), 0});
  ASSERT_EQ(r.rows.size(), 29u);
  EXPECT_TRUE(infeasibility_monotone(r));
  ASSERT_TRUE(r.infeasible_below.has_value());
  EXPECT_EQ(*r.infeasible_below, 3.0);
  ASSERT_TRUE(r.detected_threshold.has_value());
  EXPECT_GT(*r.detected_threshold, *r.infeasible_below);
  // tours, distance and cost never rise as lead time grows
  const SweepRow* prev = nullptr;
  for (const auto& x : r.rows) {
    if (!x.feasible()) {
      EXPECT_LE(x.value, *r.infeasible_below);
      continue;
    }
    if (prev) {
      EXPECT_LE(x.layer->total_tours(), prev->layer->total_tours());
      EXPECT_LE(x.totals->total_distance_km, prev->totals->total_distance_km);
      EXPECT_LE(x.totals->total_cost(), prev->totals->total_cost());
      EXPECT_GE(x.totals->fill_rate(), prev->totals->fill_rate());
    }
    prev = &x;
  }
}

TEST(Sweep, SpeedOnCapacityBoundLayer) {
  const auto target = build_scheme(bordeaux(), "pi");
  const auto r = sweep_parameter({"speed_kmh", 15, 30, 1, target, 1});
  ASSERT_EQ(r.rows.size(), 16u);
  for (double v : {15.0, 22.0, 30.0}) {
    for (const auto& a : evaluate_scheme(SweepSpec{"speed_kmh", 15, 30, 1, target, 1}.at(v))
                             .layers[1]
                             .assignments)
      EXPECT_EQ(a.binding, BindingConstraint::capacity);
  }
  for (std::size_t k = 1; k < r.rows.size(); ++k) {
    const auto& a = *r.rows[k - 1].totals;
    const auto& b = *r.rows[k].totals;
    EXPECT_LT(b.total_cost(), a.total_cost());
    EXPECT_EQ(b.total_distance_km, a.total_distance_km);
    EXPECT_EQ(b.fill_rate(), a.fill_rate());
  }
  EXPECT_FALSE(r.detected_threshold.has_value());
}

TEST(Sweep, PointsEqualStandaloneEvaluation) {
  const SweepSpec spec{"lead_time_h", 2, 6, 0.5, lead_bound(), 0};
  const auto r = sweep_parameter(spec);
  for (const auto& x : r.rows) {
    if (!x.feasible()) {
      EXPECT_THROW(evaluate_scheme(spec.at(x.value)), InfeasibleError);
      continue;
    }
    const auto alone = evaluate_scheme(spec.at(x.value));
    EXPECT_EQ(*x.totals, alone.totals);
    EXPECT_EQ(*x.layer, alone.layers[0].kpis);
  }
}

TEST(Sweep, OnlyTheSelectedLayerChanges) {
  const auto target = build_scheme(bordeaux(), "ucc");
  const SweepSpec spec{"radius_km", 5, 15, 5, target, 1};
  const auto changed = spec.at(15);
  EXPECT_EQ(changed.layers[0], target.layers[0]);
  EXPECT_EQ(changed.layers[1].params.radius_km, 15.0);
}

TEST(Sweep, TightRadiusGoesUp) {
  const auto r = sweep_parameter({"radius_km", 10, 40, 5, lead_bound(), 0});
  EXPECT_FALSE(r.slack_high);
  EXPECT_TRUE(infeasibility_monotone(r));
  ASSERT_TRUE(r.infeasible_above.has_value());
}
