#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <unordered_map>
#include <vector>

#include "nrcsim/demand.hpp"
#include "nrcsim/dynamics.hpp"
#include "nrcsim/events.hpp"
#include "nrcsim/metrics.hpp"
#include "nrcsim/network.hpp"
#include "nrcsim/routing.hpp"

namespace nrcsim {

struct EngineConfig {
  double dt = 1.0;          // s
  double end_time = 5400.0; // s; run-out past the demand horizon
  std::uint64_t seed = 1;   // Krauss imperfection noise
  double insertion_min_gap = 2.5;  // m
  bool strict = false;      // integrity faults throw instead of being counted
};

struct ModelParams {
  KraussParams krauss;
  IdmParams idm;
  ReroutePolicy cav_policy = ReroutePolicy::immediate();
  ReroutePolicy hdv_policy = ReroutePolicy::at_junction(30.0);
  TtcThresholds ttc;
  double pet_threshold = 1.0;  // s
  FuelCoefficients fuel;
  double co2_per_liter = kCo2PerLiter;
};

struct Scenario {
  Network network;
  std::vector<TripSpec> trips;
  std::vector<ClosureEvent> events;
  ModelParams params;
  EngineConfig engine;
};

/// Throws ConfigError when the scenario cannot be simulated: empty network,
/// duplicate vehicle ids, unknown trip edges, unreachable O/D pairs on the
/// open network, bad closure windows, or invalid parameters.
void validate_scenario(const Scenario& scenario);

struct VehicleState {
  std::int64_t id = 0;
  VehicleClass vehicle_class = VehicleClass::HDV;
  Route route;
  std::size_t route_index = 0;
  int lane = 0;
  double pos = 0.0;    // m from the start of the current edge (front bumper)
  double speed = 0.0;  // m/s
  double depart_time = 0.0;
  std::optional<double> insert_time;
  std::optional<double> arrival_time;
  /// Parked off the lane at the end of its current edge because the
  /// destination was unreachable; rejoins through the junction once a route opens.
  bool waiting = false;
  /// Destination unreachable under current closures; the vehicle drives to the
  /// end of its current edge and parks there.
  bool stranded = false;

  EdgeId origin = 0;
  EdgeId destination = 0;
  double traveled = 0.0;  // lengths of fully traversed edges
  /// Time the vehicle first queued at the end of its edge for admission.
  std::optional<double> junction_since;
  /// Closed edge known to lie ahead; re-evaluated every step.
  bool closure_ahead = false;
  TtcPairState ttc_pair;
  std::optional<std::size_t> open_passage;  // index into the passage log

  bool active() const noexcept { return insert_time.has_value() && !arrival_time.has_value(); }
  EdgeId current_edge() const { return route.edges[route_index]; }
};

/// Vehicle populations at the current instant, counted from the engine's
/// containers: lanes (en route), parking (waiting), the insertion queue
/// (pending), and the arrival counter.
struct StepCounts {
  std::int64_t generated = 0;
  std::int64_t arrived = 0;
  std::int64_t en_route = 0;
  std::int64_t pending = 0;
  std::int64_t waiting = 0;

  bool conserved() const noexcept { return generated == arrived + en_route + pending + waiting; }
};

/// Discrete-time simulation of one scenario.
///
/// Each step(): closures are applied and vehicles re-plan; pending departures
/// are inserted; every vehicle picks its next speed from the previous step's
/// state; vehicles move, cross junctions (one entrant per edge per step) or
/// arrive; metrics are sampled.
class Simulation {
 public:
  explicit Simulation(Scenario scenario);

  void step();
  /// True when end_time is reached or every vehicle has arrived.
  bool done() const noexcept;
  double time() const noexcept { return static_cast<double>(step_index_) * config_.dt; }
  std::int64_t step_index() const noexcept { return step_index_; }

  StepCounts counts() const;
  const Network& network() const noexcept { return network_; }
  const std::vector<VehicleState>& vehicles() const noexcept { return vehicles_; }
  const VehicleState& vehicle(std::int64_t id) const { return vehicles_.at(index_of_.at(id)); }
  /// Vehicle ids on a lane, front (largest pos) first.
  std::vector<std::int64_t> lane_occupants(EdgeId edge, int lane) const;
  const std::vector<RerouteRecord>& reroutes() const noexcept { return output_.reroutes; }

  /// Minimum bumper-to-bumper gap between consecutive vehicles on any lane
  /// (+inf when no lane holds two vehicles).
  double min_gap() const;

  /// Finalizes trip records, emissions, and PET events. The simulation must not
  /// be stepped afterwards.
  SimulationOutput finish();

 private:
  struct Lane {
    std::deque<std::size_t> vehicles;  // front first
  };
  struct LeaderInfo {
    LeaderView view;
    std::int64_t leader_id = -1;  // -1 when the view is a stop line or empty road
  };

  void apply_closures_and_reroute(double t);
  void insert_departures(double t);
  bool try_enter(std::size_t vi, std::size_t edge_idx);
  LeaderInfo leader_of(std::size_t vi, std::size_t lane_pos, const Lane& lane) const;
  double next_speed(const VehicleState& v, const LeaderInfo& leader, bool stop_line) const;
  void move_vehicles(double t);
  void record_metrics(double t);
  void check_integrity(double t);
  void fault(const std::string& what);

  const Route& free_route(EdgeId origin, EdgeId destination);
  void assign_route(VehicleState& v, Route route);
  bool next_edge_blocked(const VehicleState& v) const;

  Network network_;
  Network free_network_;
  std::vector<ClosureEvent> events_;
  ModelParams params_;
  EngineConfig config_;

  std::vector<VehicleState> vehicles_;  // ascending id
  std::unordered_map<std::int64_t, std::size_t> index_of_;
  std::deque<std::size_t> pending_;     // (depart, id) order
  std::vector<std::size_t> parked_;     // waiting vehicles, ascending id
  std::vector<std::vector<Lane>> lanes_;  // [edge index][lane]
  std::vector<int> next_lane_;            // round-robin entry lane per edge
  std::vector<char> entered_this_step_;   // per edge
  std::unordered_map<std::uint64_t, Route> free_routes_;

  // Per-step scratch, indexed like vehicles_.
  std::vector<double> prev_speed_;
  std::vector<double> prev_pos_;
  std::vector<double> new_speed_;
  std::vector<LeaderInfo> leaders_;
  std::vector<char> moved_;

  std::int64_t step_index_ = 0;
  std::int64_t arrived_ = 0;
  double fuel_ = 0.0;
  SimulationOutput output_;
  bool finished_ = false;
};

/// Steps a fresh Simulation until done() and returns its output.
SimulationOutput run(const Scenario& scenario);

}  // namespace nrcsim
