#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nrcsim/demand.hpp"
#include "nrcsim/engine.hpp"

namespace nrcsim {

/// Closure as written in a config: either explicit edge ids or the `k` most
/// central links of the network.
struct ClosureSpec {
  std::vector<EdgeId> edge_ids;
  int central_links = 0;  // > 0 selects central_edges(network, k)
  double start = 1200.0;
  double end = 2400.0;
};

struct NetworkSpec {
  std::optional<std::string> file;  // network file; grid parameters ignored when set
  int rows = 3;
  int cols = 4;
  double edge_length = 100.0;
  double speed_limit = 13.89;
  int lanes = 1;
};

/// Everything needed to run one scenario, as read from a config file:
///
///   # comment
///   network.rows = 3
///   demand.penetration = 0.25
///   closure.edges = central        # or central:2, or 12,13
///   closure edges=central start=1200 end=2400   # repeatable
///
/// Unknown keys and malformed values are errors.
struct ScenarioConfig {
  NetworkSpec network;
  DemandConfig demand;
  std::optional<std::string> trips_file;
  ModelParams params;
  std::vector<ClosureSpec> closures;
  EngineConfig engine;
  std::string output_dir = "out";
};

/// Relative file paths inside the config resolve against `base_dir`.
ScenarioConfig parse_scenario_config(std::string_view text, const std::string& base_dir = ".");
ScenarioConfig load_scenario_config(const std::string& path);

/// Builds the network, demand, and closures. Throws ConfigError/ParseError.
Scenario build_scenario(const ScenarioConfig& config);

}  // namespace nrcsim
