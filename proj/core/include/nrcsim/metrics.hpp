#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "nrcsim/demand.hpp"
#include "nrcsim/network.hpp"

namespace nrcsim {

inline constexpr double kCo2PerLiter = 2.326;  // kg CO2 per liter of fuel

// ---------------------------------------------------------------------------
// Time to collision

/// gap / closing speed when the follower is closing in, nullopt otherwise.
std::optional<double> ttc(double gap, double delta_v);

struct TtcThresholds {
  double hdv = 1.5;   // s
  double cav = 0.75;  // s

  double for_class(VehicleClass c) const noexcept { return c == VehicleClass::CAV ? cav : hdv; }
};

/// A TTC value is critical when present and at or below the follower's threshold.
bool is_critical(std::optional<double> ttc_value, VehicleClass follower_class, const TtcThresholds& t);

struct SafetyCounters {
  std::int64_t ttc_events = 0;
  std::int64_t pet_events = 0;
  std::array<std::int64_t, 2> ttc_by_class{};  // indexed by VehicleClass
  std::array<std::int64_t, 2> pet_by_class{};
};

/// Edge-triggered episode state for one follower: the leader it last saw and
/// whether that observation was critical.
struct TtcPairState {
  std::int64_t leader = -1;
  std::int64_t step = -2;
  bool critical = false;
};

/// Records one observation. A new episode (counted once) starts when the value
/// is critical and the same follower-leader pair was not critical on the
/// immediately preceding step. Returns true when an episode started.
bool count_ttc_event(VehicleClass follower_class, std::optional<double> ttc_value, TtcPairState& pair,
                     std::int64_t leader, std::int64_t step, const TtcThresholds& thresholds,
                     SafetyCounters& counters);

/// Convenience for a single follower-leader series observed on consecutive steps.
std::int64_t count_ttc_episodes(VehicleClass follower_class, std::span<const std::optional<double>> series,
                                const TtcThresholds& thresholds);

// ---------------------------------------------------------------------------
// Post-encroachment time

/// One vehicle crossing a junction from `from_edge` onto `to_edge`. Entry is
/// when its front crosses the node, exit when its rear clears it (nullopt when
/// the run ended first). Times are interpolated within the step.
struct JunctionPassage {
  NodeId node = 0;
  EdgeId from_edge = 0;
  EdgeId to_edge = 0;
  std::int64_t vehicle = 0;
  VehicleClass vehicle_class = VehicleClass::HDV;
  double entry_time = 0.0;
  std::optional<double> exit_time;
};

struct PetEvent {
  NodeId node = 0;
  EdgeId to_edge = 0;
  std::int64_t first_vehicle = 0;
  std::int64_t second_vehicle = 0;
  VehicleClass second_class = VehicleClass::HDV;
  double time = 0.0;  // entry time of the second vehicle
  double pet = 0.0;
};

/// For each pair of consecutive entrants into the same edge that came from
/// different approaches, PET = entry(second) - exit(first); pairs with
/// 0 < PET <= threshold are returned in order of the second vehicle's entry.
std::vector<PetEvent> pet_record(std::span<const JunctionPassage> log, double threshold = 1.0);

// ---------------------------------------------------------------------------
// Emissions

/// Polynomial fuel model (l/s): c0 + c1 v + c2 v^2 + c3 v^3 + c4 v a + c5 v a^2,
/// with negative (braking) results replaced by the idle rate c0.
struct FuelCoefficients {
  double c0 = 1.6e-4;
  double c1 = 1.3e-5;
  double c2 = 0.0;
  double c3 = 2.5e-7;
  double c4 = 6.0e-5;
  double c5 = 0.0;
};

double fuel_rate(double v, double a, const FuelCoefficients& c = {});
double co2_from_fuel(double fuel_liters, double co2_per_liter = kCo2PerLiter);

struct EmissionTotals {
  double fuel = 0.0;  // l
  double co2 = 0.0;   // kg
};

// ---------------------------------------------------------------------------
// Per-edge speeds

class EdgeSpeedAccumulator {
 public:
  EdgeSpeedAccumulator() = default;
  explicit EdgeSpeedAccumulator(std::size_t edge_count) : sum_(edge_count, 0.0), count_(edge_count, 0) {}

  void add(std::size_t edge_idx, double speed) {
    sum_[edge_idx] += speed;
    ++count_[edge_idx];
  }
  std::size_t size() const noexcept { return sum_.size(); }
  double sum(std::size_t edge_idx) const { return sum_[edge_idx]; }
  std::int64_t count(std::size_t edge_idx) const { return count_[edge_idx]; }
  /// nullopt for edges with no samples.
  std::optional<double> mean(std::size_t edge_idx) const;

 private:
  std::vector<double> sum_;
  std::vector<std::int64_t> count_;
};

// ---------------------------------------------------------------------------
// Run outputs and summaries

struct TripRecord {
  std::int64_t vehicle_id = 0;
  VehicleClass vehicle_class = VehicleClass::HDV;
  EdgeId origin = 0;
  EdgeId destination = 0;
  double depart = 0.0;
  std::optional<double> insert;
  std::optional<double> arrival;
  double distance = 0.0;  // m driven
  bool finished = false;

  std::optional<double> travel_time() const {
    if (!arrival) return std::nullopt;
    return *arrival - depart;
  }
};

enum class SafetyKind { TTC, PET };

struct SafetyEvent {
  double time = 0.0;
  SafetyKind kind = SafetyKind::TTC;
  std::int64_t vehicle = 0;
  std::int64_t other = 0;
  VehicleClass vehicle_class = VehicleClass::HDV;
  double value = 0.0;       // TTC or PET in s
  std::int64_t location = 0;  // edge id (TTC) or node id (PET)
};

struct RerouteRecord {
  enum class Kind { Replace, Unreachable, Resume };
  double time = 0.0;
  std::int64_t vehicle = 0;
  VehicleClass vehicle_class = VehicleClass::HDV;
  Kind kind = Kind::Replace;
  double old_cost = 0.0;
  double new_cost = 0.0;
};

struct SimulationOutput {
  std::vector<TripRecord> trips;  // ordered by vehicle id
  EdgeSpeedAccumulator edge_speeds;
  std::vector<std::int64_t> edge_entries;  // per edge index
  std::vector<SafetyEvent> safety_events;  // ordered by time
  SafetyCounters safety;
  EmissionTotals emissions;
  std::vector<RerouteRecord> reroutes;
  std::vector<JunctionPassage> passages;
  double end_time = 0.0;
  std::int64_t steps = 0;
  std::int64_t integrity_faults = 0;  // permissive mode only
};

struct SummaryRow {
  double mean_travel_time = 0.0;  // s, finished trips only
  double fuel = 0.0;              // l
  double co2 = 0.0;               // kg
  std::int64_t ttc_count = 0;
  std::int64_t pet_count = 0;
  std::int64_t finished = 0;
  std::int64_t unfinished = 0;
};

SummaryRow summarize(const SimulationOutput& output);

/// (case - baseline) / baseline * 100 per column; nullopt where the baseline is zero.
struct PercentRow {
  std::optional<double> mean_travel_time;
  std::optional<double> fuel;
  std::optional<double> co2;
  std::optional<double> ttc_count;
};

std::optional<double> percent_change(double value, double baseline);
PercentRow percent_change(const SummaryRow& value, const SummaryRow& baseline);

/// Two-decimal display form of a percentage ("154.45", "-5.37"); "NA" for nullopt.
std::string format_percent(std::optional<double> pct);

}  // namespace nrcsim
