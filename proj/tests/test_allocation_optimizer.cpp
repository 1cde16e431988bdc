#include <random>

#include <gtest/gtest.h>

#include "urbanfreight/urbanfreight.hpp"

using namespace urbanfreight;

namespace {

VehicleType veh(const std::string& id, double cap, double cd, double ct = 25, int fp = 1000,
                double speed = 20) {
  return {id, cap, speed, cd, ct, TemperatureClass::A, fp};
}

DeliveryUnitType unit(const std::string& id, double w, double stops) {
  return {id, w, stops, std::nullopt, TemperatureClass::A};
}

NetworkParams net(double r = 10, double lt = 8) {
  NetworkParams p;
  p.radius_km = r;
  p.area_km2 = 186;
  p.stop_time_h = 0.25;
  p.shift_duration_h = 8;
  p.lead_time_h = lt;
  return p;
}

OptimizationProblem problem(std::vector<VehicleType> fleet, std::vector<DeliveryUnitType> units,
                            NetworkParams p = net()) {
  return {std::move(fleet), std::move(units), p, 1, {}};
}

SaConfig fast(std::uint64_t seed = 1) {
  SaConfig c;
  c.seed = seed;
  c.steps_per_temperature = 50;
  c.restarts = 2;
  return c;
}

}  // namespace

TEST(InducedDemand, HalfSplit) {
  const auto d = induced_demand(AllocationMatrix::from_rows({{0.5, 0.5}}), {unit("pallet", 450, 100)});
  ASSERT_EQ(d.size(), 2u);
  for (const auto& x : d) {
    EXPECT_DOUBLE_EQ(x.total_stops(), 50.0);
    EXPECT_DOUBLE_EQ(x.total_weight_kg(), 22500.0);
  }
}

TEST(InducedDemand, IdentityRowGetsEverything) {
  const std::vector units{unit("pallet", 450, 10), unit("roll", 180, 6)};
  const auto d = induced_demand(AllocationMatrix::from_rows({{0, 1}, {0, 1}}), units);
  EXPECT_TRUE(d[0].empty());
  EXPECT_EQ(d[1], DemandProfile::from_units(units));
}

TEST(AllocationMatrix, RejectsBadRows) {
  EXPECT_THROW(AllocationMatrix::from_rows({{0, 0}}), DomainError);
  EXPECT_THROW(AllocationMatrix::from_rows({{0.9, 0.2}}), DomainError);
  EXPECT_THROW(AllocationMatrix::from_rows({{1.5, -0.5}}), DomainError);
  EXPECT_NO_THROW(AllocationMatrix::from_rows({{0.3, 0.7}}));
}

TEST(Objective, ZeroDemand) {
  const auto pb = problem({veh("a", 10000, 5)}, {unit("roll", 100, 0)});
  EXPECT_EQ(objective_value(AllocationMatrix::from_rows({{1}}), pb), 0.0);
}

TEST(Objective, SingleVehicleMatchesCoreModel) {
  const std::vector units{unit("pallet", 450, 30), unit("roll", 180, 12)};
  const auto v = veh("a", 17000, 5, 25, 30);
  const auto pb = problem({v}, units);
  const auto plan = solve_tour_plan(v, DemandProfile::from_units(units), pb.params);
  const auto k = plan_kpis(std::vector{plan}, pb.params, {});
  EXPECT_DOUBLE_EQ(objective_value(AllocationMatrix::from_rows({{1}, {1}}), pb), k.transport_cost());
}

TEST(Objective, SeparableAcrossVehicles) {
  const auto a = veh("a", 10000, 5);
  const auto b = veh("b", 17000, 8);
  const auto pb = problem({a, b}, {unit("pallet", 450, 100)});
  const auto half = std::vector{unit("pallet", 450, 50)};
  const double sum = objective_value(AllocationMatrix::from_rows({{1}}), problem({a}, half)) +
                     objective_value(AllocationMatrix::from_rows({{1}}), problem({b}, half));
  EXPECT_NEAR(objective_value(AllocationMatrix::from_rows({{0.5, 0.5}}), pb), sum, 1e-9 * sum);
}

TEST(Slacks, EmptyColumnIsSlack) {
  const auto pb = problem({veh("a", 10000, 5), veh("b", 10000, 5)}, {unit("roll", 100, 10)});
  const auto s = constraint_violations(AllocationMatrix::from_rows({{1, 0}}), pb);
  EXPECT_LE(s[1].capacity, 0.0);
  EXPECT_LE(s[1].shift, 0.0);
  EXPECT_LE(s[1].lead_time, 0.0);
}

TEST(Slacks, CapacityEdgeIsZero) {
  const auto pb = problem({veh("a", 1000, 5)}, {unit("roll", 500, 4)});
  const auto s = constraint_violations(AllocationMatrix::from_rows({{1}}), pb);
  EXPECT_EQ(s[0].capacity, 0.0);
}

TEST(Slacks, SolvedPlanIsFeasible) {
  auto p = net(20, 24);
  p.stop_time_h = 0.5;
  const auto pb = problem({veh("a", 25000, 5, 30, 1000, 30)}, {unit("roll", 12500, 4)}, p);
  const auto s = constraint_violations(AllocationMatrix::from_rows({{1}}), pb);
  EXPECT_LE(s[0].capacity, 0.0);
  EXPECT_LE(s[0].shift, 0.0);
  EXPECT_LE(s[0].lead_time, 0.0);
  EXPECT_FALSE(s[0].diverged);
}

TEST(Neighbor, SingleVehicleIsIdentity) {
  std::mt19937_64 rng(1);
  const auto a = AllocationMatrix::from_rows({{1}, {1}});
  EXPECT_EQ(neighbor_move(a, rng), a);
}

TEST(Neighbor, TransferDefinition) {
  const auto a = transfer(AllocationMatrix::from_rows({{1, 0}}), 0, 0, 1, 0.2);
  EXPECT_DOUBLE_EQ(a(0, 0), 0.8);
  EXPECT_DOUBLE_EQ(a(0, 1), 0.2);
}

TEST(Neighbor, RowsStayOnSimplex) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    auto a = AllocationMatrix::uniform(3, 4);
    for (int k = 0; k < 500; ++k) {
      a = neighbor_move(a, rng);
      ASSERT_NO_THROW(a.validate());
    }
  }
}

TEST(Annealing, SingleVehicleSkipsSearch) {
  const auto pb = problem({veh("a", 10000, 5)}, {unit("roll", 300, 12), unit("parcel", 10, 30)});
  const auto r = simulated_annealing(pb);
  EXPECT_EQ(r.allocation, AllocationMatrix::from_rows({{1}, {1}}));
  EXPECT_EQ(r.objective, objective_value(r.allocation, pb));
  EXPECT_EQ(r.evaluations, 1);
}

TEST(Annealing, CheaperVehicleWins) {
  const auto pb = problem({veh("cheap", 10000, 5), veh("dear", 10000, 8)}, {unit("roll", 300, 40)});
  const auto grid = brute_force_grid(pb, 0.01);
  EXPECT_EQ(grid.evaluations, 101);
  EXPECT_EQ(grid.allocation(0, 0), 1.0);
  const auto sa = simulated_annealing(pb);
  EXPECT_GT(sa.allocation(0, 0), 0.99);
  EXPECT_LE(sa.objective, grid.objective * 1.02);
}

TEST(Annealing, WithinTwoPercentOfGrid) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0, 1);
  for (int n = 0; n < 4; ++n) {
    std::vector<VehicleType> fleet{veh("v23", 2300, 5, 20, 13), veh("t17", 17000, 5, 25, 30),
                                   veh("t25", 25000, 7, 30, 68)};
    std::vector<DeliveryUnitType> units{unit("pallet", 200 + 400 * u(rng), std::floor(5 + 40 * u(rng))),
                                        unit("roll", 100 + 200 * u(rng), std::floor(5 + 40 * u(rng)))};
    const auto pb = problem(fleet, units, net(5 + 10 * u(rng), 8));
    const auto grid = brute_force_grid(pb, 0.05);
    const auto sa = simulated_annealing(pb);
    ASSERT_TRUE(grid.feasible);
    EXPECT_TRUE(sa.feasible);
    EXPECT_LE(sa.objective, grid.objective * 1.02) << n;
  }
}

TEST(Annealing, DeterministicPerSeed) {
  const auto pb = problem({veh("a", 5000, 5), veh("b", 12000, 7), veh("c", 2300, 5, 20)},
                          {unit("pallet", 450, 20), unit("roll", 180, 35)});
  const auto x = simulated_annealing(pb, fast(9));
  const auto y = simulated_annealing(pb, fast(9));
  EXPECT_EQ(x.allocation, y.allocation);
  EXPECT_EQ(x.objective, y.objective);
  EXPECT_EQ(x.trace, y.trace);
  EXPECT_EQ(x.evaluations, y.evaluations);
}

TEST(Annealing, TraceNeverIncreases) {
  const auto pb = problem({veh("a", 5000, 5), veh("b", 12000, 7)}, {unit("pallet", 450, 20)});
  const auto r = simulated_annealing(pb, fast(3));
  ASSERT_FALSE(r.trace.empty());
  for (std::size_t k = 1; k < r.trace.size(); ++k) EXPECT_LE(r.trace[k], r.trace[k - 1]);
}

TEST(Annealing, FeasibleResultsRecheck) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto pb = problem({veh("a", 5000, 5), veh("b", 12000, 7)},
                            {unit("pallet", 450, 20), unit("roll", 180, 10)}, net(10, 4));
    const auto r = simulated_annealing(pb, fast(seed));
    if (!r.feasible) continue;
    for (const auto& s : constraint_violations(r.allocation, pb)) EXPECT_LE(s.excess(), 1e-6);
  }
}

TEST(Annealing, NoFeasibleAllocation) {
  // lead time shorter than a round trip for every vehicle
  auto p = net(30, 2);
  const auto pb = problem({veh("a", 5000, 5), veh("b", 12000, 7)}, {unit("roll", 300, 20)}, p);
  const auto r = simulated_annealing(pb, fast());
  EXPECT_FALSE(r.feasible);
  EXPECT_NO_THROW(r.allocation.validate());
}

TEST(Annealing, ArgminIgnoresCostScale) {
  const std::vector units{unit("pallet", 450, 25), unit("roll", 180, 30)};
  std::vector fleet{veh("a", 5000, 5, 20), veh("b", 12000, 7, 25), veh("c", 17000, 8, 30)};
  const auto base = brute_force_grid(problem(fleet, units), 0.05);
  for (auto& v : fleet) {
    v.cost_per_km *= 3;
    v.cost_per_hour *= 3;
  }
  const auto scaled = brute_force_grid(problem(fleet, units), 0.05);
  EXPECT_EQ(base.allocation, scaled.allocation);
  EXPECT_NEAR(scaled.objective, 3 * base.objective, 1e-9 * scaled.objective);
}

TEST(Grid, SingleVehicle) {
  const auto pb = problem({veh("a", 10000, 5)}, {unit("roll", 300, 12)});
  const auto r = brute_force_grid(pb, 0.05);
  EXPECT_EQ(r.evaluations, 1);
  EXPECT_EQ(r.objective, objective_value(AllocationMatrix::from_rows({{1}}), pb));
}

TEST(Grid, RefusesHugeGrids) {
  std::vector<VehicleType> fleet;
  for (int i = 0; i < 10; ++i) fleet.push_back(veh("v" + std::to_string(i), 10000, 5));
  const auto pb = problem(fleet, {unit("a", 1, 1), unit("b", 1, 1), unit("c", 1, 1)});
  EXPECT_GT(grid_size(10, 3, 0.01), kGridPointLimit);
  EXPECT_THROW(brute_force_grid(pb, 0.01), DomainError);
}

TEST(Grid, StepMustDivideOne) {
  const auto pb = problem({veh("a", 10000, 5), veh("b", 10000, 5)}, {unit("roll", 300, 12)});
  EXPECT_THROW(brute_force_grid(pb, 0.3), DomainError);
}

TEST(Grid, TiesPickLexicographicallySmallest) {
  const auto pb = problem({veh("a", 10000, 5), veh("b", 10000, 5)}, {unit("roll", 300, 12)});
  const auto r = brute_force_grid(pb, 0.5);
  EXPECT_EQ(r.allocation, AllocationMatrix::from_rows({{0, 1}}));
}

TEST(Grid, SizeFormula) {
  EXPECT_EQ(grid_size(2, 1, 0.01), 101.0);
  EXPECT_EQ(grid_size(3, 3, 0.05), 231.0 * 231.0 * 231.0);
}

TEST(RoundStops, LargestRemainder) {
  const auto pb = problem({veh("a", 10000, 5), veh("b", 10000, 5), veh("c", 10000, 5)},
                          {unit("roll", 300, 10)});
  const auto r = evaluate_allocation(AllocationMatrix::from_rows({{0.35, 0.35, 0.3}}), pb);
  const auto& row = r.integral_stops[0];
  EXPECT_EQ(row[0] + row[1] + row[2], 10);
  EXPECT_EQ(row[2], 3);
}

TEST(Layer, PoolsUnitsAcrossClasses) {
  const auto dem = DemandProfile::from_units(
      {{"roll", 100, 10, std::nullopt, TemperatureClass::F},
       {"roll", 300, 10, std::nullopt, TemperatureClass::S},
       {"pallet", 450, 2, 255.0, TemperatureClass::A}});
  const auto u = pool_units(dem);
  ASSERT_EQ(u.size(), 2u);
  EXPECT_EQ(u[0].id, "roll");
  EXPECT_DOUBLE_EQ(u[0].stops, 20.0);
  EXPECT_DOUBLE_EQ(u[0].avg_weight_kg, 200.0);
  EXPECT_EQ(u[1].position_weight_kg, 255.0);
}

TEST(Layer, ApplyingAllocationMatchesObjective) {
  const auto sc = load_scenario(UF_DATA_DIR "/bordeaux.scenario");
  const auto spec = build_scheme(sc, "s1");
  const auto pb = problem_from_layer(spec.layers[0], {*sc.find_vehicle("t17_F"), *sc.find_vehicle("t25_F")});
  const auto alloc = AllocationMatrix::from_rows(std::vector<std::vector<double>>(pb.units.size(), {1, 0}));
  const auto layer = apply_allocation(spec.layers[0], pb, alloc);
  EXPECT_NEAR(evaluate_layer(layer).kpis.transport_cost(), objective_value(alloc, pb), 1e-9);
}

TEST(Layer, ShuttleLayerHasNothingToAllocate) {
  const auto sc = load_scenario(UF_DATA_DIR "/bordeaux.scenario");
  const auto spec = build_scheme(sc, "ucc");
  EXPECT_THROW(problem_from_layer(spec.layers[0], {*sc.find_vehicle("t25_A")}), DomainError);
}
