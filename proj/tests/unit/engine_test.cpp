#include "nrcsim/engine.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "nrcsim/csv_output.hpp"
#include "nrcsim/error.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"

namespace nrcsim {
namespace {

using testsupport::deterministic;
using testsupport::line_network;
using testsupport::trip;

TEST(Engine, LoneVehicleCrossesEdgeOnOracleStep) {
  Simulation sim(deterministic(line_network(2), {trip(1, 0.0, 0, 1)}));
  const int want = oracle::crossing_step(2.6, 13.89, 100.0);
  EXPECT_EQ(want, 10);
  int steps = 0;
  while (sim.vehicle(1).route_index == 0) {
    sim.step();
    ++steps;
  }
  EXPECT_EQ(steps, want);
  // Speeds follow free acceleration until the limit binds.
  EXPECT_DOUBLE_EQ(sim.vehicle(1).speed, 13.89);
}

TEST(Engine, LoneVehicleSpeedSequence) {
  Simulation sim(deterministic(line_network(3), {trip(1, 0.0, 0, 2)}));
  const std::vector<double> want{2.6, 5.2, 7.8, 10.4, 13.0, 13.89, 13.89};
  for (double w : want) {
    sim.step();
    EXPECT_NEAR(sim.vehicle(1).speed, w, 1e-12);
  }
}

TEST(Engine, ZeroTrips) {
  const auto out = run(deterministic(build_grid(2, 2), {}));
  EXPECT_TRUE(out.trips.empty());
  EXPECT_EQ(out.emissions.fuel, 0.0);
  EXPECT_EQ(out.emissions.co2, 0.0);
  EXPECT_TRUE(out.safety_events.empty());
}

TEST(Engine, FollowerNeverOverlapsLeader) {
  auto s = deterministic(line_network(1, 500.0), {});
  s.network.add_node({99, 600, 0});
  s.network.add_edge({1, 1, 99, 100, 13.89, 1});
  s.trips = {trip(1, 0.0, 0, 1), trip(2, 10.0, 0, 1)};
  s.params.krauss.sigma = 0.5;
  Simulation sim(std::move(s));
  while (!sim.done()) {
    sim.step();
    EXPECT_GE(sim.min_gap(), 0.0);
  }
  const auto out = sim.finish();
  EXPECT_TRUE(out.trips[0].finished && out.trips[1].finished);
}

TEST(Engine, ClosedNextEdgeWithoutAlternativeParks) {
  for (auto cls : {VehicleClass::HDV, VehicleClass::CAV}) {
    auto s = deterministic(line_network(3), {trip(1, 0.0, 0, 2, cls)});
    s.events.push_back({{1}, 3.0, 60.0});
    Simulation sim(std::move(s));
    bool parked = false;
    while (!sim.done()) {
      sim.step();
      const auto& v = sim.vehicle(1);
      EXPECT_TRUE(sim.counts().conserved());
      if (v.waiting) {
        parked = true;
        EXPECT_EQ(v.current_edge(), 0);
        EXPECT_DOUBLE_EQ(v.pos, 100.0);
        EXPECT_DOUBLE_EQ(v.speed, 0.0);
        EXPECT_EQ(sim.counts().waiting, 1);
        EXPECT_EQ(sim.counts().en_route, 0);
        EXPECT_LT(sim.time(), 60.0 + 1e-9);
      }
      if (v.active() && v.route_index == 1) EXPECT_GE(sim.time(), 60.0);
    }
    EXPECT_TRUE(parked);
    const auto out = sim.finish();
    ASSERT_TRUE(out.trips[0].finished);
    EXPECT_GT(*out.trips[0].arrival, 60.0);
    EXPECT_DOUBLE_EQ(out.trips[0].distance, 300.0);
  }
}

TEST(Engine, ClosedOriginDefersInsertion) {
  auto s = deterministic(line_network(3), {trip(1, 5.0, 0, 2)});
  s.events.push_back({{0}, 0.0, 50.0});
  const auto out = run(s);
  ASSERT_TRUE(out.trips[0].insert);
  EXPECT_DOUBLE_EQ(*out.trips[0].insert, 50.0);
  EXPECT_GT(*out.trips[0].travel_time(), 45.0);
}

TEST(Engine, UnreachableCavWaitsToDepart) {
  auto s = deterministic(line_network(3), {trip(1, 5.0, 0, 2, VehicleClass::CAV)});
  s.events.push_back({{1}, 0.0, 50.0});
  const auto out = run(s);
  ASSERT_TRUE(out.trips[0].insert);
  EXPECT_DOUBLE_EQ(*out.trips[0].insert, 50.0);
}

TEST(Engine, RerouteTiming) {
  const auto cav = testsupport::reroute_probe(VehicleClass::CAV);
  ASSERT_TRUE(cav.mid_route_at_closure);
  ASSERT_TRUE(cav.reroute_time);
  EXPECT_EQ(*cav.reroute_time, cav.closure_time);
  EXPECT_FALSE(cav.entered_closed_edge);
  EXPECT_TRUE(cav.arrived);

  const auto hdv = testsupport::reroute_probe(VehicleClass::HDV);
  ASSERT_TRUE(hdv.mid_route_at_closure);
  ASSERT_TRUE(hdv.reroute_time);
  EXPECT_GT(*hdv.reroute_time, hdv.closure_time);
  EXPECT_FALSE(hdv.entered_closed_edge);
  EXPECT_TRUE(hdv.arrived);
}

TEST(Engine, UnfinishedTripsReported) {
  auto s = deterministic(line_network(3), {trip(1, 0.0, 0, 2), trip(2, 1.0, 1, 2)});
  s.engine.end_time = 8.0;
  const auto out = run(s);
  ASSERT_EQ(out.trips.size(), 2u);
  EXPECT_FALSE(out.trips[0].finished);
  EXPECT_FALSE(out.trips[0].arrival);
  EXPECT_EQ(summarize(out).unfinished, 2);
}

TEST(Engine, ValidatesScenario) {
  EXPECT_THROW(run(deterministic(Network{}, {})), ConfigError);
  EXPECT_THROW(run(deterministic(line_network(2), {trip(1, 0, 0, 9)})), ConfigError);
  EXPECT_THROW(run(deterministic(line_network(2), {trip(1, 0, 0, 1), trip(1, 1, 0, 1)})), ConfigError);
  EXPECT_THROW(run(deterministic(line_network(2), {trip(1, 0, 1, 0)})), ConfigError);
  auto bad_dt = deterministic(line_network(2), {});
  bad_dt.engine.dt = 0.0;
  EXPECT_THROW(run(bad_dt), ConfigError);
}

class GridRun : public ::testing::Test {
 protected:
  static Scenario scenario(double penetration, bool closure) {
    return build_scenario(testsupport::small_grid(closure, penetration, 3));
  }
};

TEST_F(GridRun, ConservationAndIntegrity) {
  for (double p : {0.0, 0.5, 1.0}) {
    const auto r = testsupport::stepped_run(scenario(p, true));
    EXPECT_EQ(r.conservation_failures, 0);
    EXPECT_EQ(r.output.integrity_faults, 0);
    EXPECT_EQ(r.last.arrived + r.last.en_route + r.last.pending + r.last.waiting, r.last.generated);
    EXPECT_EQ(r.output.trips.size(), 600u);
  }
}

TEST_F(GridRun, EntriesRespectJunctionRuleAndClosures) {
  Simulation sim(scenario(0.5, true));
  std::vector<EdgeId> before(sim.vehicles().size(), -1);
  while (!sim.done()) {
    sim.step();
    std::map<EdgeId, int> entrants;
    for (std::size_t i = 0; i < sim.vehicles().size(); ++i) {
      const auto& v = sim.vehicles()[i];
      const EdgeId now = v.active() && !v.waiting ? v.current_edge() : -1;
      if (now != -1 && now != before[i]) {
        ++entrants[now];
        EXPECT_FALSE(sim.network().edge(now).closed) << "vehicle " << v.id << " t=" << sim.time();
      }
      before[i] = v.active() ? v.current_edge() : -1;
    }
    for (const auto& [edge, n] : entrants) ASSERT_LE(n, 1) << "edge " << edge << " t=" << sim.time();
  }
}

TEST_F(GridRun, TripInvariants) {
  const auto s = scenario(0.5, false);
  const auto out = run(s);
  double distance = 0;
  for (const auto& t : out.trips) {
    ASSERT_TRUE(t.finished);
    distance += t.distance;
    // Free-flow bound: nothing drives faster than the 13.89 m/s limit.
    EXPECT_GE(*t.travel_time() + 1e-9, t.distance / 13.89);
  }
  double by_edges = 0;
  for (std::size_t e = 0; e < s.network.edges().size(); ++e) {
    by_edges += static_cast<double>(out.edge_entries[e]) * s.network.edges()[e].length;
  }
  EXPECT_NEAR(distance, by_edges, 1e-6);
  for (std::size_t e = 0; e < s.network.edges().size(); ++e) {
    if (const auto m = out.edge_speeds.mean(e)) EXPECT_LE(*m, s.network.edges()[e].speed_limit + 1e-12);
  }
}

TEST_F(GridRun, Co2ExactlyProportional) {
  const auto out = run(scenario(0.25, true));
  ASSERT_GT(out.emissions.fuel, 0.0);
  EXPECT_LT(std::abs(out.emissions.co2 - kCo2PerLiter * out.emissions.fuel) / out.emissions.co2, 1e-12);
}

TEST_F(GridRun, Deterministic) {
  const auto s = scenario(0.5, true);
  const auto a = run(s);
  const auto b = run(s);
  EXPECT_EQ(trips_csv(a), trips_csv(b));
  EXPECT_EQ(safety_csv(a), safety_csv(b));
  EXPECT_EQ(edge_speeds_csv(s.network, a.edge_speeds), edge_speeds_csv(s.network, b.edge_speeds));
}

TEST_F(GridRun, PetEventsWithinThreshold) {
  const auto out = run(scenario(0.0, true));
  for (const auto& e : out.safety_events) {
    if (e.kind != SafetyKind::PET) continue;
    EXPECT_GT(e.value, 0.0);
    EXPECT_LE(e.value, 1.0);
  }
  EXPECT_EQ(static_cast<std::int64_t>(std::count_if(out.safety_events.begin(), out.safety_events.end(),
                                                    [](const SafetyEvent& e) { return e.kind == SafetyKind::PET; })),
            out.safety.pet_events);
}

TEST(Engine, MultiLaneRoundRobin) {
  auto s = deterministic(line_network(2, 100.0, 13.89, 2), {});
  for (int i = 0; i < 6; ++i) s.trips.push_back(trip(i + 1, 0.0, 0, 1));
  Simulation sim(std::move(s));
  std::set<int> lanes;
  for (int k = 0; k < 4; ++k) {
    sim.step();
    for (const auto& v : sim.vehicles()) {
      if (v.active()) lanes.insert(v.lane);
    }
  }
  EXPECT_EQ(lanes, (std::set<int>{0, 1}));
}

}  // namespace
}  // namespace nrcsim
