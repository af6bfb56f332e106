#include "nrcsim/demand.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "nrcsim/error.hpp"
#include "nrcsim/rng.hpp"
#include "text_util.hpp"

namespace nrcsim {

namespace {
constexpr std::uint64_t kClassStream = 0x43415653ULL;  // "CAVS"
}

std::string_view to_string(VehicleClass c) noexcept { return c == VehicleClass::CAV ? "CAV" : "HDV"; }

int cav_count(double penetration, int n) {
  return static_cast<int>(std::lround(penetration * static_cast<double>(n)));
}

std::vector<TripSpec> generate_trips(const Network& network, const DemandConfig& config) {
  if (config.total_vehicles < 0) throw std::invalid_argument("demand: total_vehicles must be >= 0");
  if (!(config.horizon > 0.0)) throw std::invalid_argument("demand: horizon must be positive");
  if (!(config.penetration >= 0.0 && config.penetration <= 1.0)) {
    throw std::invalid_argument("demand: penetration must lie in [0, 1]");
  }

  std::vector<EdgeId> open;
  for (const auto& e : network.edges()) {
    if (!e.closed) open.push_back(e.id);
  }
  if (open.size() < 2) throw std::invalid_argument("demand: network needs at least 2 open edges");

  const auto n = static_cast<std::size_t>(config.total_vehicles);
  Rng rng(config.seed);
  std::vector<TripSpec> trips(n);
  for (auto& t : trips) {
    t.depart_time = rng.uniform() * config.horizon;
    // uniform() < 1, but the product can round up to the horizon itself.
    if (t.depart_time >= config.horizon) t.depart_time = std::nextafter(config.horizon, 0.0);
    const auto o = rng.below(open.size());
    auto d = rng.below(open.size() - 1);
    if (d >= o) ++d;
    t.origin = open[o];
    t.destination = open[d];
  }
  std::stable_sort(trips.begin(), trips.end(),
                   [](const TripSpec& a, const TripSpec& b) { return a.depart_time < b.depart_time; });
  for (std::size_t i = 0; i < n; ++i) trips[i].vehicle_id = static_cast<std::int64_t>(i);

  // Fisher-Yates over ids on an independent stream.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng class_rng(mix64(config.seed ^ kClassStream));
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[class_rng.below(i)]);
  }
  const int cavs = cav_count(config.penetration, config.total_vehicles);
  for (int i = 0; i < cavs; ++i) trips[order[static_cast<std::size_t>(i)]].vehicle_class = VehicleClass::CAV;
  return trips;
}

std::string save_trips(const std::vector<TripSpec>& trips) {
  std::string out;
  for (const auto& t : trips) {
    out += fmt::format("trip {} {} {} {} {}\n", t.vehicle_id, t.depart_time, t.origin, t.destination,
                       to_string(t.vehicle_class));
  }
  return out;
}

std::vector<TripSpec> load_trips(std::string_view text) {
  std::vector<TripSpec> trips;
  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto tok = detail::split_ws(line);
    if (tok.size() != 6 || tok[0] != "trip") {
      throw ParseError(line_no, "expected: trip <id> <depart> <origin_edge> <dest_edge> <HDV|CAV>");
    }
    TripSpec t;
    const auto id = detail::parse_number<std::int64_t>(tok[1]);
    const auto dep = detail::parse_number<double>(tok[2]);
    const auto o = detail::parse_number<std::int64_t>(tok[3]);
    const auto d = detail::parse_number<std::int64_t>(tok[4]);
    if (!id || !dep || !o || !d || !std::isfinite(*dep) || *dep < 0.0) {
      throw ParseError(line_no, "malformed trip fields");
    }
    if (*o == *d) throw ParseError(line_no, "trip origin and destination must differ");
    if (tok[5] == "HDV") {
      t.vehicle_class = VehicleClass::HDV;
    } else if (tok[5] == "CAV") {
      t.vehicle_class = VehicleClass::CAV;
    } else {
      throw ParseError(line_no, fmt::format("unknown vehicle class '{}'", tok[5]));
    }
    t.vehicle_id = *id;
    t.depart_time = *dep;
    t.origin = *o;
    t.destination = *d;
    trips.push_back(t);
  });
  std::stable_sort(trips.begin(), trips.end(), [](const TripSpec& a, const TripSpec& b) {
    if (a.depart_time != b.depart_time) return a.depart_time < b.depart_time;
    return a.vehicle_id < b.vehicle_id;
  });
  return trips;
}

}  // namespace nrcsim
