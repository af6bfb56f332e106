// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "nrcsim/csv_output.hpp"
#include "nrcsim/dynamics.hpp"
#include "nrcsim/experiment.hpp"
#include "nrcsim/metrics.hpp"
#include "nrcsim/routing.hpp"
#include "oracles.hpp"
#include "platoon.hpp"
#include "random_graph.hpp"
#include "scenarios.hpp"

namespace {

using namespace nrcsim;
using Clock = std::chrono::steady_clock;

std::map<int, std::pair<bool, std::string>> results;

void report(int id, bool ok, const std::string& detail) { results[id] = {ok, detail}; }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Every simulated run's emission totals, for the proportionality check.
std::vector<EmissionTotals> all_emissions;

SummaryRow summarize_run(const SimulationOutput& out) {
  all_emissions.push_back(out.emissions);
  return summarize(out);
}

struct GridPair {
  SummaryRow org, nrc;
  double seconds = 0;
  std::int64_t conservation_failures = 0;
  std::int64_t steps_checked = 0;
  bool all_reported = true;
};

GridPair run_pair(double penetration) {
  GridPair p;
  const auto t0 = Clock::now();
  for (bool closure : {false, true}) {
    const auto r = testsupport::stepped_run(build_scenario(testsupport::small_grid(closure, penetration)));
    const auto row = summarize_run(r.output);
    p.conservation_failures += r.conservation_failures;
    p.steps_checked += r.steps_checked;
    if (r.output.trips.size() != 600u || row.finished + row.unfinished != 600) p.all_reported = false;
    (closure ? p.nrc : p.org) = row;
  }
  p.seconds = seconds_since(t0);
  return p;
}

void criteria_1_2_10(GridPair& hdv, GridPair& cav) {
  hdv = run_pair(0.0);
  const double rise = (hdv.nrc.mean_travel_time - hdv.org.mean_travel_time) / hdv.org.mean_travel_time;
  report(1, rise >= 0.10 && hdv.seconds < 60.0,
         fmt::format("NRC mean travel time {:.2f} s vs ORG {:.2f} s (+{:.1f}%, need >= 10%); {:.2f} s runtime",
                     hdv.nrc.mean_travel_time, hdv.org.mean_travel_time, 100 * rise, hdv.seconds));

  cav = run_pair(1.0);
  const bool better = cav.org.mean_travel_time < hdv.org.mean_travel_time &&
                      cav.nrc.mean_travel_time < hdv.nrc.mean_travel_time;
  report(2, better && cav.seconds < 60.0 && hdv.seconds < 60.0,
         fmt::format("ORG {:.2f} -> {:.2f} s, NRC {:.2f} -> {:.2f} s at 100% CAV; pair runtimes {:.2f} s / {:.2f} s",
                     hdv.org.mean_travel_time, cav.org.mean_travel_time, hdv.nrc.mean_travel_time,
                     cav.nrc.mean_travel_time, hdv.seconds, cav.seconds));

  const bool unfinished_reported = hdv.all_reported;
  report(10, hdv.conservation_failures == 0 && unfinished_reported,
         fmt::format("{} conservation violations over {} checked steps; unfinished ORG {} / NRC {} reported, "
                     "all 600 trips present: {}",
                     hdv.conservation_failures, hdv.steps_checked, hdv.org.unfinished, hdv.nrc.unfinished,
                     unfinished_reported ? "yes" : "no"));
}

void criterion_3() {
  const std::vector<double> pens{0, 25, 50, 75, 100};
  std::vector<ScenarioConfig> configs;
  for (double p : pens) configs.push_back(testsupport::small_grid(true, p / 100.0));
  const auto t0 = Clock::now();
  const auto runs = run_many(configs, 1);
  const double secs = seconds_since(t0);
  std::vector<double> times;
  for (const auto& r : runs) {
    all_emissions.push_back(r.output.emissions);
    times.push_back(r.summary.mean_travel_time);
  }
  const double rho = oracle::spearman(pens, times);
  report(3, times.back() < times.front() && rho <= -0.7 && secs < 300.0,
         fmt::format("mean travel time {:.2f} / {:.2f} / {:.2f} / {:.2f} / {:.2f} s; Spearman {:.3f}; {:.2f} s runtime",
                     times[0], times[1], times[2], times[3], times[4], rho, secs));
}

void criterion_4() {
  const IdmParams p;
  double worst = 0;
  for (int v = 0; v <= 12; v += 2) {
    worst = std::max(worst, std::abs(idm_acceleration(v, 0.0, equilibrium_gap(v, p, p.v_max), p)));
  }
  report(4, worst < 1e-9, fmt::format("max |a| at equilibrium gap {:.3e}", worst));
}

void criterion_5() {
  KraussParams p;
  p.sigma = 0.0;
  std::int64_t negative = 0;
  double min_gap = 1e300;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = testsupport::krauss_platoon(seed, 20, 3600, p, 1.0);
    negative += s.negative_gaps;
    min_gap = std::min(min_gap, s.min_gap);
  }
  report(5, negative == 0, fmt::format("{} negative gaps in 10 platoons; smallest gap {:.4f} m", negative, min_gap));
}

void criterion_6() {
  std::mt19937_64 rng(6);
  int mismatches = 0, closed_hits = 0, queries = 0;
  for (int g = 0; g < 100; ++g) {
    auto net = testsupport::random_strong_graph(rng, 10);
    for (int q = 0; q < 20; ++q, ++queries) {
      const auto a = testsupport::pick_edge(rng, net), b = testsupport::pick_edge(rng, net);
      const auto r = shortest_path(net, a, b);
      const auto want = oracle::min_path_cost(net, a, b);
      if (!r || !want || std::abs(r->cost - *want) > 1e-9) ++mismatches;
    }
    const auto closed = testsupport::pick_edge(rng, net);
    net.set_closed(net.edge_index(closed), true);
    for (int q = 0; q < 20; ++q, ++queries) {
      const auto a = testsupport::pick_edge(rng, net), b = testsupport::pick_edge(rng, net);
      const auto r = shortest_path(net, a, b);
      const auto want = oracle::min_path_cost(net, a, b);
      if (r.has_value() != want.has_value() || (r && std::abs(r->cost - *want) > 1e-9)) ++mismatches;
      if (r && std::find(r->edges.begin(), r->edges.end(), closed) != r->edges.end()) ++closed_hits;
    }
  }
  report(6, mismatches == 0 && closed_hits == 0,
         fmt::format("{} queries on 100 graphs: {} cost mismatches, {} routes through a closed edge", queries,
                     mismatches, closed_hits));
}

void criterion_7() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::uniform_int_distribution<int> len(0, 200);
  const TtcThresholds th;
  int mismatches = 0;
  std::int64_t episodes = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::optional<double>> s(static_cast<std::size_t>(len(rng)));
    for (auto& x : s) {
      const double r = u(rng);
      x = r > 2.6 ? std::nullopt : std::optional<double>(r);
    }
    const auto cls = i % 2 ? VehicleClass::CAV : VehicleClass::HDV;
    const auto got = count_ttc_episodes(cls, s, th);
    episodes += got;
    if (got != oracle::run_length_episodes(s, th.for_class(cls))) ++mismatches;
  }
  report(7, mismatches == 0, fmt::format("1000 series, {} episodes, {} mismatches", episodes, mismatches));
}

void criterion_8() {
  double worst = 0;
  for (const auto& e : all_emissions) {
    if (e.co2 > 0) worst = std::max(worst, std::abs(e.co2 - kCo2PerLiter * e.fuel) / e.co2);
  }
  double worst_table = 0;
  for (auto [fuel, co2] : {std::pair{573.84, 1334.94}, std::pair{5087.02, 11834.20}, std::pair{6390.38, 14865.48}}) {
    worst_table = std::max(worst_table, std::abs(co2_from_fuel(fuel) - co2) / co2);
  }
  report(8, !all_emissions.empty() && worst < 1e-12 && worst_table < 5e-4,
         fmt::format("{} runs, max relative error {:.2e}; table rows within {:.4f}%", all_emissions.size(), worst,
                     100 * worst_table));
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_9() {
  const auto base = std::filesystem::temp_directory_path() / "nrcsim_acceptance_determinism";
  std::filesystem::remove_all(base);
  auto cfg = testsupport::small_grid(true, 0.5, 9);
  for (const char* run : {"a", "b"}) {
    auto r = run_scenario(cfg);
    all_emissions.push_back(r.output.emissions);
    write_run_outputs((base / run).string(), r);
  }
  int differing = 0;
  std::size_t bytes = 0;
  for (const char* f : {"trips.csv", "edge_speeds.csv", "summary.csv", "safety.csv"}) {
    const auto a = read_file(base / "a" / f);
    const auto b = read_file(base / "b" / f);
    bytes += a.size();
    if (a.empty() || a != b) ++differing;
  }
  std::filesystem::remove_all(base);
  report(9, differing == 0, fmt::format("{} of 4 output files differ ({} bytes compared)", differing, bytes));
}

void criterion_11() {
  const auto cav = testsupport::reroute_probe(VehicleClass::CAV);
  const auto hdv = testsupport::reroute_probe(VehicleClass::HDV);
  const bool ok = cav.mid_route_at_closure && hdv.mid_route_at_closure && cav.reroute_time && hdv.reroute_time &&
                  *cav.reroute_time == cav.closure_time && *hdv.reroute_time > hdv.closure_time &&
                  !cav.entered_closed_edge && !hdv.entered_closed_edge;
  report(11, ok,
         fmt::format("closure at t={}; CAV rerouted at t={}, HDV at t={}", cav.closure_time,
                     cav.reroute_time ? fmt::format("{}", *cav.reroute_time) : "never",
                     hdv.reroute_time ? fmt::format("{}", *hdv.reroute_time) : "never"));
}

}  // namespace

int main() {
  GridPair hdv, cav;
  criteria_1_2_10(hdv, cav);
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_9();
  criterion_8();
  criterion_11();
  int failures = 0;
  for (const auto& [id, r] : results) {
    fmt::print("[{}] criterion {:>2}: {}\n", r.first ? "PASS" : "FAIL", id, r.second);
    if (!r.first) ++failures;
  }
  fmt::print("{} of {} criteria failed\n", failures, results.size());
  return failures == 0 ? 0 : 1;
}
