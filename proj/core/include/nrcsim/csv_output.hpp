#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nrcsim/metrics.hpp"
#include "nrcsim/network.hpp"

namespace nrcsim {

/// CSV writers. Header row first, comma separated, '.' decimals, LF endings,
/// shortest round-trip number formatting, "NA" for missing values.
std::string trips_csv(const SimulationOutput& output);
std::string edge_speeds_csv(const Network& network, const EdgeSpeedAccumulator& speeds);
std::string summary_csv(const SummaryRow& row);
std::string safety_csv(const SimulationOutput& output);

/// Per-edge midpoint and mean speed from an edge_speeds.csv document. Throws
/// ParseError on malformed input.
std::string heatmap_csv(std::string_view edge_speeds);

/// Reads back a summary.csv document.
SummaryRow parse_summary_csv(std::string_view text);

/// Writes `content` to `path` in binary mode, creating parent directories.
void write_text_file(const std::string& path, std::string_view content);

}  // namespace nrcsim
