#include "nrcsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include <fmt/format.h>

namespace nrcsim {

std::optional<double> ttc(double gap, double delta_v) {
  if (delta_v > 0.0) return gap / delta_v;
  return std::nullopt;
}

bool is_critical(std::optional<double> ttc_value, VehicleClass follower_class, const TtcThresholds& t) {
  return ttc_value.has_value() && *ttc_value <= t.for_class(follower_class);
}

bool count_ttc_event(VehicleClass follower_class, std::optional<double> ttc_value, TtcPairState& pair,
                     std::int64_t leader, std::int64_t step, const TtcThresholds& thresholds,
                     SafetyCounters& counters) {
  const bool critical = is_critical(ttc_value, follower_class, thresholds);
  const bool was_critical = pair.critical && pair.leader == leader && pair.step + 1 == step;
  pair = {leader, step, critical};
  if (critical && !was_critical) {
    ++counters.ttc_events;
    ++counters.ttc_by_class[static_cast<std::size_t>(follower_class)];
    return true;
  }
  return false;
}

std::int64_t count_ttc_episodes(VehicleClass follower_class, std::span<const std::optional<double>> series,
                                const TtcThresholds& thresholds) {
  SafetyCounters counters;
  TtcPairState pair;
  for (std::size_t i = 0; i < series.size(); ++i) {
    count_ttc_event(follower_class, series[i], pair, 0, static_cast<std::int64_t>(i), thresholds, counters);
  }
  return counters.ttc_events;
}

std::vector<PetEvent> pet_record(std::span<const JunctionPassage> log, double threshold) {
  // Group entrants by target edge, ordered by (entry time, vehicle id).
  std::map<EdgeId, std::vector<const JunctionPassage*>> by_edge;
  for (const auto& p : log) by_edge[p.to_edge].push_back(&p);

  std::vector<PetEvent> events;
  for (auto& [edge, passages] : by_edge) {
    std::stable_sort(passages.begin(), passages.end(), [](const JunctionPassage* a, const JunctionPassage* b) {
      if (a->entry_time != b->entry_time) return a->entry_time < b->entry_time;
      return a->vehicle < b->vehicle;
    });
    for (std::size_t i = 1; i < passages.size(); ++i) {
      const auto& first = *passages[i - 1];
      const auto& second = *passages[i];
      if (first.from_edge == second.from_edge || !first.exit_time) continue;
      const double pet = second.entry_time - *first.exit_time;
      if (pet > 0.0 && pet <= threshold) {
        events.push_back({second.node, edge, first.vehicle, second.vehicle, second.vehicle_class,
                          second.entry_time, pet});
      }
    }
  }
  std::stable_sort(events.begin(), events.end(), [](const PetEvent& a, const PetEvent& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.second_vehicle < b.second_vehicle;
  });
  return events;
}

double fuel_rate(double v, double a, const FuelCoefficients& c) {
  const double rate = c.c0 + c.c1 * v + c.c2 * v * v + c.c3 * v * v * v + c.c4 * v * a + c.c5 * v * a * a;
  // Negative (hard braking) means fuel cut-off; report idle burn instead.
  return rate < 0.0 ? c.c0 : rate;
}

double co2_from_fuel(double fuel_liters, double co2_per_liter) { return co2_per_liter * fuel_liters; }

std::optional<double> EdgeSpeedAccumulator::mean(std::size_t edge_idx) const {
  if (count_[edge_idx] == 0) return std::nullopt;
  return sum_[edge_idx] / static_cast<double>(count_[edge_idx]);
}

SummaryRow summarize(const SimulationOutput& output) {
  SummaryRow row;
  double total = 0.0;
  for (const auto& t : output.trips) {
    if (t.finished) {
      total += *t.travel_time();
      ++row.finished;
    } else {
      ++row.unfinished;
    }
  }
  row.mean_travel_time = row.finished > 0 ? total / static_cast<double>(row.finished) : 0.0;
  row.fuel = output.emissions.fuel;
  row.co2 = output.emissions.co2;
  row.ttc_count = output.safety.ttc_events;
  row.pet_count = output.safety.pet_events;
  return row;
}

std::optional<double> percent_change(double value, double baseline) {
  if (baseline == 0.0) return std::nullopt;
  return (value - baseline) / baseline * 100.0;
}

PercentRow percent_change(const SummaryRow& value, const SummaryRow& baseline) {
  return {percent_change(value.mean_travel_time, baseline.mean_travel_time),
          percent_change(value.fuel, baseline.fuel), percent_change(value.co2, baseline.co2),
          percent_change(static_cast<double>(value.ttc_count), static_cast<double>(baseline.ttc_count))};
}

std::string format_percent(std::optional<double> pct) {
  if (!pct) return "NA";
  // Avoid "-0.00" for tiny negative values.
  const double rounded = std::round(*pct * 100.0) / 100.0;
  return fmt::format("{:.2f}", rounded == 0.0 ? 0.0 : rounded);
}

}  // namespace nrcsim
