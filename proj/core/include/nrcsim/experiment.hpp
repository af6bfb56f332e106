#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nrcsim/metrics.hpp"
#include "nrcsim/scenario.hpp"

namespace nrcsim {

/// Process exit codes shared by every command.
enum ExitCode : int { kExitOk = 0, kExitConfigError = 1, kExitIntegrityFault = 2 };

struct RunResult {
  Network network;  // as simulated (closure flags reflect the last step)
  std::vector<TripSpec> trips;
  SimulationOutput output;
  SummaryRow summary;
};

RunResult run_scenario(const ScenarioConfig& config);

/// Writes trips.csv, edge_speeds.csv, summary.csv and safety.csv into `dir`.
void write_run_outputs(const std::string& dir, const RunResult& result);

/// Runs `configs` with up to `jobs` worker threads; results keep input order.
std::vector<RunResult> run_many(const std::vector<ScenarioConfig>& configs, int jobs);

struct SimulateOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;  // overrides demand and engine seeds
  std::optional<std::string> out_dir;
  bool strict = false;
};

struct CompareOptions {
  std::string org_config;
  std::string nrc_config;
  std::string out_dir;
  std::vector<double> penetration = {0.0, 100.0};  // percent: HDV case, CAV case
  int jobs = 1;
};

struct SweepOptions {
  std::string config_path;
  std::vector<double> penetration = {0.0, 25.0, 50.0, 75.0, 100.0};  // percent
  std::string out_dir;
  int jobs = 1;
};

struct HeatmapOptions {
  std::string in_path;
  std::string out_path;
};

/// Each command reports failures on `err` and returns an ExitCode.
int cmd_simulate(const SimulateOptions& options, std::ostream& log, std::ostream& err);
int cmd_compare(const CompareOptions& options, std::ostream& log, std::ostream& err);
int cmd_sweep(const SweepOptions& options, std::ostream& log, std::ostream& err);
int cmd_heatmap(const HeatmapOptions& options, std::ostream& log, std::ostream& err);

/// table.csv body for the four cases in fixed order ORG, NRC, ORG(CAV), NRC(CAV):
/// ORG as absolute values, the others as percent change against ORG.
std::string comparison_table_csv(const SummaryRow& org, const SummaryRow& nrc, const SummaryRow& org_cav,
                                 const SummaryRow& nrc_cav);

struct SweepPoint {
  double penetration = 0.0;  // percent
  SummaryRow summary;
};
std::string sweep_csv(const std::vector<SweepPoint>& points);

/// Parses "0,25,50" into percentages, each in [0, 100]. Throws ConfigError.
std::vector<double> parse_penetration_list(const std::string& text);

}  // namespace nrcsim
