#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nrcsim/network.hpp"

namespace nrcsim {

enum class VehicleClass { HDV, CAV };

std::string_view to_string(VehicleClass c) noexcept;

struct TripSpec {
  std::int64_t vehicle_id = 0;
  double depart_time = 0.0;  // s, in [0, horizon)
  EdgeId origin = 0;
  EdgeId destination = 0;
  VehicleClass vehicle_class = VehicleClass::HDV;

  friend bool operator==(const TripSpec&, const TripSpec&) = default;
};

struct DemandConfig {
  int total_vehicles = 600;
  double horizon = 3600.0;
  double penetration = 0.0;  // CAV share in [0, 1]
  std::uint64_t seed = 1;
};

/// Number of CAV assigned for `penetration` over `n` vehicles (round half away from zero).
int cav_count(double penetration, int n);

/// Uniform random trips over the open edges of `network`.
///
/// Departure times and O/D pairs come from one seeded stream and do not depend
/// on `penetration`; classes come from a second stream that shuffles vehicle ids
/// and marks the first round(p * n) as CAV. Two configs that differ only in
/// penetration therefore share identical departures and O/D pairs, and the CAV
/// set at a lower penetration is a subset of the set at a higher one.
///
/// Output is sorted by departure time; vehicle ids are assigned in that order.
std::vector<TripSpec> generate_trips(const Network& network, const DemandConfig& config);

/// Line format: `trip <id> <depart> <origin_edge> <dest_edge> <HDV|CAV>`.
std::string save_trips(const std::vector<TripSpec>& trips);
std::vector<TripSpec> load_trips(std::string_view text);

}  // namespace nrcsim
