#include "nrcsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_set>
#include <utility>

#include <fmt/format.h>

#include "nrcsim/error.hpp"
#include "nrcsim/rng.hpp"

namespace nrcsim {

namespace {

// A vehicle this close to a stop line is placed on it and stopped.
constexpr double kStopSnap = 0.05;
// IDM is undefined for s <= 0; anything below 1 cm hits the emergency branch.
constexpr double kTinyGap = 1e-6;

std::uint64_t od_key(std::size_t o, std::size_t d) {
  return (static_cast<std::uint64_t>(o) << 32) | static_cast<std::uint64_t>(d);
}

double vehicle_length(const ModelParams& p, VehicleClass c) {
  return c == VehicleClass::CAV ? p.idm.length : p.krauss.length;
}

}  // namespace

void validate_scenario(const Scenario& s) {
  if (s.network.empty() || s.network.edges().empty()) throw ConfigError("scenario network is empty");
  if (!(s.engine.dt > 0.0)) throw ConfigError("engine.dt must be positive");
  if (!(s.engine.end_time > 0.0)) throw ConfigError("engine.end_time must be positive");
  if (!(s.engine.insertion_min_gap >= 0.0)) throw ConfigError("engine.insertion_min_gap must be >= 0");
  try {
    validate(s.params.krauss);
    validate(s.params.idm);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(s.params.krauss.tau >= s.engine.dt)) {
    throw ConfigError("krauss.tau must be >= engine.dt for the safe-speed law to hold");
  }
  validate_events(s.network, s.events);

  Network open = s.network;
  open.open_all();
  std::unordered_set<std::int64_t> ids;
  std::map<std::pair<EdgeId, EdgeId>, bool> checked;
  for (const auto& t : s.trips) {
    if (!ids.insert(t.vehicle_id).second) throw ConfigError(fmt::format("duplicate vehicle id {}", t.vehicle_id));
    if (!open.has_edge(t.origin) || !open.has_edge(t.destination)) {
      throw ConfigError(fmt::format("trip {} references an unknown edge", t.vehicle_id));
    }
    if (t.origin == t.destination) throw ConfigError(fmt::format("trip {} has origin == destination", t.vehicle_id));
    if (!(t.depart_time >= 0.0) || !std::isfinite(t.depart_time)) {
      throw ConfigError(fmt::format("trip {} has an invalid departure time", t.vehicle_id));
    }
    auto [it, fresh] = checked.emplace(std::pair{t.origin, t.destination}, false);
    if (fresh) it->second = shortest_path(open, t.origin, t.destination).has_value();
    if (!it->second) {
      throw ConfigError(fmt::format("trip {}: edge {} cannot reach edge {}", t.vehicle_id, t.origin, t.destination));
    }
  }
}

Simulation::Simulation(Scenario scenario)
    : network_(std::move(scenario.network)),
      events_(std::move(scenario.events)),
      params_(scenario.params),
      config_(scenario.engine) {
  Scenario check{network_, scenario.trips, events_, params_, config_};
  validate_scenario(check);

  network_.open_all();
  free_network_ = network_;

  auto trips = std::move(scenario.trips);
  std::sort(trips.begin(), trips.end(),
            [](const TripSpec& a, const TripSpec& b) { return a.vehicle_id < b.vehicle_id; });
  vehicles_.reserve(trips.size());
  for (const auto& t : trips) {
    VehicleState v;
    v.id = t.vehicle_id;
    v.vehicle_class = t.vehicle_class;
    v.depart_time = t.depart_time;
    v.origin = t.origin;
    v.destination = t.destination;
    index_of_.emplace(v.id, vehicles_.size());
    vehicles_.push_back(std::move(v));
  }
  std::vector<std::size_t> order(vehicles_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return vehicles_[a].depart_time < vehicles_[b].depart_time;
  });
  pending_.assign(order.begin(), order.end());

  const std::size_t ne = network_.edges().size();
  lanes_.resize(ne);
  for (std::size_t e = 0; e < ne; ++e) lanes_[e].resize(static_cast<std::size_t>(network_.edges()[e].lane_count));
  next_lane_.assign(ne, 0);
  entered_this_step_.assign(ne, 0);

  const std::size_t nv = vehicles_.size();
  prev_speed_.assign(nv, 0.0);
  prev_pos_.assign(nv, 0.0);
  new_speed_.assign(nv, 0.0);
  leaders_.assign(nv, {});
  moved_.assign(nv, 0);

  output_.edge_speeds = EdgeSpeedAccumulator(ne);
  output_.edge_entries.assign(ne, 0);
}

const Route& Simulation::free_route(EdgeId origin, EdgeId destination) {
  const auto key = od_key(free_network_.edge_index(origin), free_network_.edge_index(destination));
  auto it = free_routes_.find(key);
  if (it == free_routes_.end()) {
    // validate_scenario guarantees reachability on the open network.
    it = free_routes_.emplace(key, *shortest_path(free_network_, origin, destination)).first;
  }
  return it->second;
}

void Simulation::assign_route(VehicleState& v, Route route) {
  // `route` starts at the vehicle's current edge; keep the traversed prefix.
  std::vector<EdgeId> edges(v.route.edges.begin(),
                            v.route.edges.begin() + static_cast<std::ptrdiff_t>(v.route_index));
  edges.insert(edges.end(), route.edges.begin(), route.edges.end());
  for (std::size_t i = v.route_index + 1; i < edges.size(); ++i) {
    if (network_.edge(edges[i]).closed) fault(fmt::format("vehicle {} assigned a route through closed edge {}", v.id, edges[i]));
  }
  if (!is_connected_route(network_, edges)) fault(fmt::format("vehicle {} assigned a disconnected route", v.id));
  v.route.cost = route_length(network_, edges);
  v.route.edges = std::move(edges);
}

bool Simulation::next_edge_blocked(const VehicleState& v) const {
  if (v.stranded) return true;
  if (v.route_index + 1 >= v.route.edges.size()) return false;
  return network_.edge(v.route.edges[v.route_index + 1]).closed;
}

void Simulation::fault(const std::string& what) {
  if (config_.strict) throw IntegrityFault(fmt::format("t={}: {}", time(), what));
  ++output_.integrity_faults;
}

bool Simulation::done() const noexcept {
  if (time() >= config_.end_time - 1e-9) return true;
  return arrived_ == static_cast<std::int64_t>(vehicles_.size());
}

// (1) closures and re-planning, ascending vehicle id.
void Simulation::apply_closures_and_reroute(double t) {
  const bool changed = !apply_events(network_, events_, t).empty();
  for (auto& v : vehicles_) {
    if (!v.active()) continue;
    if (!changed && !v.closure_ahead) continue;

    const auto& policy = v.vehicle_class == VehicleClass::CAV ? params_.cav_policy : params_.hdv_policy;
    const RouteProgress progress{v.route.edges, v.route_index, v.pos};
    auto decision = plan_reroute(progress, network_, policy);
    const double old_cost = v.route.cost;
    switch (decision.kind) {
      case RerouteDecision::Kind::Keep: {
        bool closed_ahead = false;
        for (std::size_t i = v.route_index + 1; i < v.route.edges.size(); ++i) {
          if (network_.edge(v.route.edges[i]).closed) {
            closed_ahead = true;
            break;
          }
        }
        if (v.stranded && !closed_ahead) {
          v.stranded = false;
          output_.reroutes.push_back({t, v.id, v.vehicle_class, RerouteRecord::Kind::Resume, old_cost, old_cost});
        }
        v.closure_ahead = closed_ahead && !v.stranded;
        break;
      }
      case RerouteDecision::Kind::Replace:
        assign_route(v, std::move(decision.route));
        v.stranded = false;
        v.closure_ahead = false;
        output_.reroutes.push_back({t, v.id, v.vehicle_class, RerouteRecord::Kind::Replace, old_cost, v.route.cost});
        break;
      case RerouteDecision::Kind::Unreachable:
        if (!v.stranded) {
          output_.reroutes.push_back({t, v.id, v.vehicle_class, RerouteRecord::Kind::Unreachable, old_cost, old_cost});
        }
        v.stranded = true;
        v.closure_ahead = false;
        break;
    }
  }
}

/// Places vehicle `vi` at the start of edge `edge_idx` on the edge's next entry
/// lane if the edge is open, nobody else entered it this step, the lane has
/// room, and no upstream vehicle is about to cross into it.
bool Simulation::try_enter(std::size_t vi, std::size_t edge_idx) {
  VehicleState& v = vehicles_[vi];
  const Edge& edge = network_.edges()[edge_idx];
  if (edge.closed || entered_this_step_[edge_idx]) return false;
  const int lane = next_lane_[edge_idx];
  auto& occupants = lanes_[edge_idx][static_cast<std::size_t>(lane)].vehicles;
  if (!occupants.empty()) {
    const auto& last = vehicles_[occupants.back()];
    if (last.pos - vehicle_length(params_, last.vehicle_class) < config_.insertion_min_gap) return false;
  }
  const double len = vehicle_length(params_, v.vehicle_class);
  for (const std::size_t u : network_.in_edges(network_.node_index(edge.from))) {
    for (const auto& up_lane : lanes_[u]) {
      if (up_lane.vehicles.empty()) continue;
      const auto& f = vehicles_[up_lane.vehicles.front()];
      if (f.stranded || f.route_index + 1 >= f.route.edges.size() || f.route.edges[f.route_index + 1] != edge.id) {
        continue;
      }
      const double gap = network_.edges()[u].length - f.pos - len;
      if (gap < config_.insertion_min_gap + f.speed * config_.dt) return false;
    }
  }
  v.lane = lane;
  v.pos = 0.0;
  v.speed = 0.0;
  occupants.push_back(vi);
  next_lane_[edge_idx] = (lane + 1) % edge.lane_count;
  entered_this_step_[edge_idx] = 1;
  ++output_.edge_entries[edge_idx];
  return true;
}

// (2) parked vehicles rejoin, then pending departures are inserted.
void Simulation::insert_departures(double t) {
  std::fill(entered_this_step_.begin(), entered_this_step_.end(), 0);

  std::vector<std::size_t> still_parked;
  for (const std::size_t vi : parked_) {
    VehicleState& v = vehicles_[vi];
    if (v.stranded) {
      still_parked.push_back(vi);
      continue;
    }
    const std::size_t from = network_.edge_index(v.current_edge());
    const std::size_t next = network_.edge_index(v.route.edges[v.route_index + 1]);
    if (!try_enter(vi, next)) {
      still_parked.push_back(vi);
      continue;
    }
    const Edge& from_edge = network_.edges()[from];
    output_.passages.push_back({from_edge.to, from_edge.id, network_.edges()[next].id, v.id, v.vehicle_class, t, {}});
    v.open_passage = output_.passages.size() - 1;
    v.traveled += from_edge.length;
    v.route_index += 1;
    v.waiting = false;
  }
  parked_ = std::move(still_parked);

  std::deque<std::size_t> still_pending;
  while (!pending_.empty()) {
    const std::size_t vi = pending_.front();
    VehicleState& v = vehicles_[vi];
    if (v.depart_time > t + 1e-9) break;
    pending_.pop_front();

    const auto& policy = v.vehicle_class == VehicleClass::CAV ? params_.cav_policy : params_.hdv_policy;
    Route route;
    if (policy.mode == ReroutePolicy::Mode::Immediate) {
      // Informed vehicles do not depart towards an unreachable destination.
      auto r = shortest_path(network_, v.origin, v.destination);
      if (!r) {
        still_pending.push_back(vi);
        continue;
      }
      route = std::move(*r);
    } else {
      route = free_route(v.origin, v.destination);
    }
    if (!try_enter(vi, network_.edge_index(v.origin))) {
      still_pending.push_back(vi);
      continue;
    }
    v.route = std::move(route);
    v.route_index = 0;
    v.insert_time = t;
    for (std::size_t i = 1; i < v.route.edges.size(); ++i) {
      if (network_.edge(v.route.edges[i]).closed) v.closure_ahead = true;
    }
  }
  // Vehicles that could not be inserted keep their queue position ahead of later departures.
  for (auto it = still_pending.rbegin(); it != still_pending.rend(); ++it) pending_.push_front(*it);
}

Simulation::LeaderInfo Simulation::leader_of(std::size_t vi, std::size_t lane_pos, const Lane& lane) const {
  const VehicleState& v = vehicles_[vi];
  if (lane_pos > 0) {
    const auto& l = vehicles_[lane.vehicles[lane_pos - 1]];
    return {LeaderView::vehicle(l.speed, l.pos - vehicle_length(params_, l.vehicle_class) - v.pos), l.id};
  }
  if (v.route_index + 1 >= v.route.edges.size()) return {};
  const Edge& here = network_.edge(v.current_edge());
  const double to_end = here.length - v.pos;
  if (next_edge_blocked(v)) return {LeaderView::vehicle(0.0, to_end), -1};

  const std::size_t next = network_.edge_index(v.route.edges[v.route_index + 1]);
  const auto& next_lane = lanes_[next][static_cast<std::size_t>(next_lane_[next])].vehicles;
  if (next_lane.empty()) return {};
  const auto& l = vehicles_[next_lane.back()];
  return {LeaderView::vehicle(l.speed, to_end + l.pos - vehicle_length(params_, l.vehicle_class)), l.id};
}

double Simulation::next_speed(const VehicleState& v, const LeaderInfo& leader, bool stop_line) const {
  const double limit = network_.edge(v.current_edge()).speed_limit;
  LeaderView view = leader.view;
  if (v.vehicle_class == VehicleClass::CAV) {
    // Stop lines are shifted by s0 so the vehicle comes to rest on the line itself.
    if (view.present) view.gap = std::max(stop_line ? view.gap + params_.idm.s0 : view.gap, kTinyGap);
    return idm_step(v.speed, view, limit, config_.dt, params_.idm);
  }
  if (view.present && !stop_line) view.gap = std::max(0.0, view.gap - params_.krauss.min_gap);
  if (view.present) view.gap = std::max(0.0, view.gap);
  const double noise = counter_uniform(config_.seed, static_cast<std::uint64_t>(v.id),
                                       static_cast<std::uint64_t>(step_index_));
  return krauss_step(v.speed, view, limit, config_.dt, noise, params_.krauss);
}

// (3) + (4): synchronous speed choice, then movement with junction admission.
void Simulation::move_vehicles(double t) {
  const double dt = config_.dt;
  const auto& edges = network_.edges();

  // Speeds from the previous state.
  for (std::size_t e = 0; e < lanes_.size(); ++e) {
    for (const auto& lane : lanes_[e]) {
      for (std::size_t k = 0; k < lane.vehicles.size(); ++k) {
        const std::size_t vi = lane.vehicles[k];
        const auto& v = vehicles_[vi];
        leaders_[vi] = leader_of(vi, k, lane);
        const bool stop_line = k == 0 && leaders_[vi].view.present && leaders_[vi].leader_id < 0;
        prev_speed_[vi] = v.speed;
        prev_pos_[vi] = v.pos;
        new_speed_[vi] = next_speed(v, leaders_[vi], stop_line);
        moved_[vi] = 1;
      }
    }
  }

  struct Candidate {
    std::size_t vi;
    double since;
  };
  std::map<std::size_t, std::vector<Candidate>> contenders;  // by target edge index

  std::vector<std::vector<std::vector<std::size_t>>> snapshot(lanes_.size());
  for (std::size_t e = 0; e < lanes_.size(); ++e) {
    for (const auto& lane : lanes_[e]) snapshot[e].emplace_back(lane.vehicles.begin(), lane.vehicles.end());
  }

  // Front vehicles: arrivals, stop lines, and junction candidates.
  std::vector<std::size_t> arrivals;
  std::vector<std::size_t> parking;
  for (std::size_t e = 0; e < lanes_.size(); ++e) {
    const double len = edges[e].length;
    for (const auto& lane : lanes_[e]) {
      if (lane.vehicles.empty()) continue;
      const std::size_t vi = lane.vehicles.front();
      VehicleState& v = vehicles_[vi];
      const double target = v.pos + new_speed_[vi] * dt;
      if (v.route_index + 1 >= v.route.edges.size()) {
        if (target >= len) {
          arrivals.push_back(vi);
        } else {
          v.pos = target;
          v.speed = new_speed_[vi];
        }
        continue;
      }
      if (next_edge_blocked(v)) {
        if (target >= len - kStopSnap) {
          v.speed = v.pos >= len ? 0.0 : std::min(new_speed_[vi], (len - v.pos) / dt);
          v.pos = len;
          if (new_speed_[vi] * dt < kStopSnap) v.speed = 0.0;
          if (v.stranded) parking.push_back(vi);
        } else {
          v.pos = target;
          v.speed = new_speed_[vi];
        }
        continue;
      }
      if (target > len) {
        contenders[network_.edge_index(v.route.edges[v.route_index + 1])].push_back({vi, v.junction_since.value_or(t)});
        continue;
      }
      v.pos = target;
      v.speed = new_speed_[vi];
    }
  }

  // Admission: one entrant per edge per step, earliest queued first, then lowest id.
  struct Transfer {
    std::size_t vi;
    std::size_t from_edge;
    std::size_t to_edge;
    double old_pos;
    double new_pos;
  };
  std::vector<Transfer> transfers;
  for (auto& [target_edge, cands] : contenders) {
    std::sort(cands.begin(), cands.end(), [&](const Candidate& a, const Candidate& b) {
      if (a.since != b.since) return a.since < b.since;
      return vehicles_[a.vi].id < vehicles_[b.vi].id;
    });
    const auto& entry_lane = lanes_[target_edge][static_cast<std::size_t>(next_lane_[target_edge])].vehicles;
    double room = edges[target_edge].length;
    if (!entry_lane.empty()) {
      const auto& last = vehicles_[entry_lane.back()];
      room = std::min(room, last.pos - vehicle_length(params_, last.vehicle_class));
    }
    bool admitted = entered_this_step_[target_edge] != 0 || edges[target_edge].closed;
    for (const auto& c : cands) {
      VehicleState& v = vehicles_[c.vi];
      const std::size_t from = network_.edge_index(v.current_edge());
      const double len = edges[from].length;
      const double overshoot = v.pos + new_speed_[c.vi] * dt - len;
      if (!admitted && room > 0.0) {
        admitted = true;
        transfers.push_back({c.vi, from, target_edge, v.pos, std::min(overshoot, room)});
      } else {
        v.junction_since = c.since;
        v.pos = len;
        v.speed = 0.0;
      }
    }
  }

  for (const auto& tr : transfers) {
    VehicleState& v = vehicles_[tr.vi];
    const Edge& to = edges[tr.to_edge];
    const double from_len = edges[tr.from_edge].length;
    const double displacement = from_len - tr.old_pos + tr.new_pos;
    auto& src_lane = lanes_[tr.from_edge][static_cast<std::size_t>(v.lane)].vehicles;
    src_lane.pop_front();

    const int lane = next_lane_[tr.to_edge];
    lanes_[tr.to_edge][static_cast<std::size_t>(lane)].vehicles.push_back(tr.vi);
    next_lane_[tr.to_edge] = (lane + 1) % to.lane_count;
    entered_this_step_[tr.to_edge] = 1;
    ++output_.edge_entries[tr.to_edge];

    const double vlen = vehicle_length(params_, v.vehicle_class);
    const double entry = displacement > 0.0 ? t + dt * (from_len - tr.old_pos) / displacement : t;
    std::optional<double> exit;
    if (tr.new_pos >= vlen && displacement > 0.0) exit = t + dt * (from_len - tr.old_pos + vlen) / displacement;
    if (v.open_passage) output_.passages[*v.open_passage].exit_time = entry;  // cleared by moving on
    output_.passages.push_back({edges[tr.from_edge].to, edges[tr.from_edge].id, to.id, v.id, v.vehicle_class, entry, exit});
    v.open_passage = exit ? std::nullopt : std::optional<std::size_t>(output_.passages.size() - 1);

    v.traveled += from_len;
    v.lane = lane;
    v.pos = tr.new_pos;
    v.speed = std::min(displacement / dt, to.speed_limit);
    v.route_index += 1;
    v.junction_since.reset();
  }

  for (const std::size_t vi : arrivals) {
    VehicleState& v = vehicles_[vi];
    const std::size_t e = network_.edge_index(v.current_edge());
    lanes_[e][static_cast<std::size_t>(v.lane)].vehicles.pop_front();
    v.traveled += edges[e].length;
    v.pos = edges[e].length;
    v.speed = new_speed_[vi];
    v.arrival_time = t + dt;
    if (v.open_passage) {
      output_.passages[*v.open_passage].exit_time = *v.arrival_time;
      v.open_passage.reset();
    }
    ++arrived_;
  }

  for (const std::size_t vi : parking) {
    VehicleState& v = vehicles_[vi];
    lanes_[network_.edge_index(v.current_edge())][static_cast<std::size_t>(v.lane)].vehicles.pop_front();
    v.waiting = true;
    v.speed = 0.0;
    parked_.insert(std::lower_bound(parked_.begin(), parked_.end(), vi), vi);
  }

  // Followers, front to back, bounded by their leader's final rear position. A
  // follower never leaves its lane in the same step as the vehicle ahead of it.
  for (std::size_t e = 0; e < snapshot.size(); ++e) {
    const double len = edges[e].length;
    for (const auto& order : snapshot[e]) {
      for (std::size_t k = 1; k < order.size(); ++k) {
        VehicleState& v = vehicles_[order[k]];
        const VehicleState& ahead = vehicles_[order[k - 1]];
        double bound = len;
        if (ahead.active()) {
          const double rear = ahead.pos - vehicle_length(params_, ahead.vehicle_class);
          bound = network_.edge_index(ahead.current_edge()) == e ? rear : std::min(len, len + rear);
        }
        const double target = v.pos + new_speed_[order[k]] * dt;
        const double pos = std::min({target, bound, len});
        if (pos < target) {
          v.speed = std::max(0.0, (pos - v.pos) / dt);
        } else {
          v.speed = new_speed_[order[k]];
        }
        v.pos = std::max(v.pos, pos);
      }
    }
  }

  // Rear-clearance times for vehicles that entered an edge on an earlier step.
  for (auto& v : vehicles_) {
    const std::size_t vi = index_of_.at(v.id);
    if (!v.active() || !v.open_passage || !moved_[vi]) continue;
    auto& passage = output_.passages[*v.open_passage];
    if (network_.edge(v.current_edge()).id != passage.to_edge) continue;
    const double vlen = vehicle_length(params_, v.vehicle_class);
    if (v.pos >= vlen) {
      const double prev = prev_pos_[vi];
      passage.exit_time = v.pos > prev ? t + dt * std::clamp((vlen - prev) / (v.pos - prev), 0.0, 1.0) : t + dt;
      v.open_passage.reset();
    }
  }
}

// (5) metrics sampled from this step's decisions and final state.
void Simulation::record_metrics(double t) {
  const double dt = config_.dt;
  for (std::size_t vi = 0; vi < vehicles_.size(); ++vi) {
    if (!moved_[vi]) continue;
    VehicleState& v = vehicles_[vi];
    const double accel = (v.speed - prev_speed_[vi]) / dt;
    fuel_ += fuel_rate(v.speed, accel, params_.fuel) * dt;
    if (v.active()) output_.edge_speeds.add(network_.edge_index(v.current_edge()), v.speed);

    const auto& leader = leaders_[vi];
    if (leader.leader_id < 0) continue;
    const auto value = ttc(std::max(0.0, leader.view.gap), prev_speed_[vi] - leader.view.leader_speed);
    if (count_ttc_event(v.vehicle_class, value, v.ttc_pair, leader.leader_id, step_index_, params_.ttc,
                        output_.safety)) {
      output_.safety_events.push_back(
          {t, SafetyKind::TTC, v.id, leader.leader_id, v.vehicle_class, *value, v.current_edge()});
    }
  }
}

void Simulation::check_integrity(double t) {
  const auto& edges = network_.edges();
  for (std::size_t e = 0; e < lanes_.size(); ++e) {
    for (const auto& lane : lanes_[e]) {
      for (std::size_t k = 0; k < lane.vehicles.size(); ++k) {
        const auto& v = vehicles_[lane.vehicles[k]];
        if (v.waiting || !v.active()) fault(fmt::format("vehicle {} on a lane but flagged waiting/inactive", v.id));
        if (v.pos < -1e-9 || v.pos > edges[e].length + 1e-9) {
          fault(fmt::format("vehicle {} at pos {} outside edge {}", v.id, v.pos, edges[e].id));
        }
        if (v.speed < 0.0 || v.speed > edges[e].speed_limit + 1e-9) {
          fault(fmt::format("vehicle {} speed {} outside [0, {}]", v.id, v.speed, edges[e].speed_limit));
        }
        if (k == 0) continue;
        const auto& l = vehicles_[lane.vehicles[k - 1]];
        const double gap = l.pos - vehicle_length(params_, l.vehicle_class) - v.pos;
        if (gap < -1e-9) {
          fault(fmt::format("negative gap {} between vehicles {} and {} on edge {}", gap, v.id, l.id, edges[e].id));
        }
      }
    }
  }
  const auto c = counts();
  if (!c.conserved()) {
    fault(fmt::format("vehicle conservation broken at t={}: generated={} arrived={} en_route={} pending={} waiting={}",
                      t, c.generated, c.arrived, c.en_route, c.pending, c.waiting));
  }
}

void Simulation::step() {
  if (finished_) throw std::logic_error("Simulation::step after finish()");
  const double t = time();
  std::fill(moved_.begin(), moved_.end(), 0);
  apply_closures_and_reroute(t);
  insert_departures(t);
  move_vehicles(t);
  record_metrics(t);
  check_integrity(t);
  ++step_index_;
  ++output_.steps;
}

StepCounts Simulation::counts() const {
  StepCounts c;
  c.generated = static_cast<std::int64_t>(vehicles_.size());
  c.pending = static_cast<std::int64_t>(pending_.size());
  c.arrived = arrived_;
  c.waiting = static_cast<std::int64_t>(parked_.size());
  for (const auto& edge_lanes : lanes_) {
    for (const auto& lane : edge_lanes) c.en_route += static_cast<std::int64_t>(lane.vehicles.size());
  }
  return c;
}

std::vector<std::int64_t> Simulation::lane_occupants(EdgeId edge, int lane) const {
  std::vector<std::int64_t> ids;
  for (const std::size_t vi : lanes_.at(network_.edge_index(edge)).at(static_cast<std::size_t>(lane)).vehicles) {
    ids.push_back(vehicles_[vi].id);
  }
  return ids;
}

double Simulation::min_gap() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& edge_lanes : lanes_) {
    for (const auto& lane : edge_lanes) {
      for (std::size_t k = 1; k < lane.vehicles.size(); ++k) {
        const auto& l = vehicles_[lane.vehicles[k - 1]];
        const auto& f = vehicles_[lane.vehicles[k]];
        best = std::min(best, l.pos - vehicle_length(params_, l.vehicle_class) - f.pos);
      }
    }
  }
  return best;
}

SimulationOutput Simulation::finish() {
  if (finished_) throw std::logic_error("Simulation::finish called twice");
  finished_ = true;
  output_.end_time = time();

  output_.trips.reserve(vehicles_.size());
  for (const auto& v : vehicles_) {
    TripRecord r;
    r.vehicle_id = v.id;
    r.vehicle_class = v.vehicle_class;
    r.origin = v.origin;
    r.destination = v.destination;
    r.depart = v.depart_time;
    r.insert = v.insert_time;
    r.arrival = v.arrival_time;
    r.finished = v.arrival_time.has_value();
    r.distance = v.traveled + (v.active() ? v.pos : 0.0);
    output_.trips.push_back(r);
  }

  output_.emissions.fuel = fuel_;
  output_.emissions.co2 = co2_from_fuel(fuel_, params_.co2_per_liter);

  for (const auto& pet : pet_record(output_.passages, params_.pet_threshold)) {
    ++output_.safety.pet_events;
    ++output_.safety.pet_by_class[static_cast<std::size_t>(pet.second_class)];
    output_.safety_events.push_back(
        {pet.time, SafetyKind::PET, pet.second_vehicle, pet.first_vehicle, pet.second_class, pet.pet, pet.node});
  }
  std::stable_sort(output_.safety_events.begin(), output_.safety_events.end(),
                   [](const SafetyEvent& a, const SafetyEvent& b) {
                     if (a.time != b.time) return a.time < b.time;
                     if (a.kind != b.kind) return a.kind < b.kind;
                     return a.vehicle < b.vehicle;
                   });
  return std::move(output_);
}

SimulationOutput run(const Scenario& scenario) {
  Simulation sim(scenario);
  while (!sim.done()) sim.step();
  return sim.finish();
}

}  // namespace nrcsim
