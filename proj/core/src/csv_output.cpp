#include "nrcsim/csv_output.hpp"

#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "nrcsim/error.hpp"
#include "text_util.hpp"

namespace nrcsim {

namespace {

std::string opt(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string("NA"); }

std::string_view kind_name(SafetyKind k) { return k == SafetyKind::TTC ? "TTC" : "PET"; }

}  // namespace

std::string trips_csv(const SimulationOutput& output) {
  std::string out = "id,class,depart,insert,arrival,travel_time,distance,finished\n";
  for (const auto& t : output.trips) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", t.vehicle_id, to_string(t.vehicle_class), t.depart, opt(t.insert),
                       opt(t.arrival), opt(t.travel_time()), t.distance, t.finished ? 1 : 0);
  }
  return out;
}

std::string edge_speeds_csv(const Network& network, const EdgeSpeedAccumulator& speeds) {
  std::string out = "edge_id,from_x,from_y,to_x,to_y,mean_speed,samples\n";
  for (std::size_t i = 0; i < network.edges().size(); ++i) {
    const auto& e = network.edges()[i];
    const auto& a = network.node(e.from);
    const auto& b = network.node(e.to);
    out += fmt::format("{},{},{},{},{},{},{}\n", e.id, a.x, a.y, b.x, b.y, opt(speeds.mean(i)), speeds.count(i));
  }
  return out;
}

std::string summary_csv(const SummaryRow& row) {
  return fmt::format("mean_travel_time,fuel,co2,ttc_count,pet_count,finished,unfinished\n{},{},{},{},{},{},{}\n",
                     row.mean_travel_time, row.fuel, row.co2, row.ttc_count, row.pet_count, row.finished,
                     row.unfinished);
}

std::string safety_csv(const SimulationOutput& output) {
  std::string out = "time,kind,vehicle,other,class,value,location\n";
  for (const auto& e : output.safety_events) {
    out += fmt::format("{},{},{},{},{},{},{}\n", e.time, kind_name(e.kind), e.vehicle, e.other,
                       to_string(e.vehicle_class), e.value, e.location);
  }
  return out;
}

std::string heatmap_csv(std::string_view edge_speeds) {
  std::string out = "edge_id,mid_x,mid_y,mean_speed,samples\n";
  bool header = true;
  detail::for_each_line(edge_speeds, [&](std::size_t line, std::string_view content) {
    const auto cols = detail::split(content, ',');
    if (header) {
      if (cols.size() != 7 || cols[0] != "edge_id") throw ParseError(line, "expected edge_speeds.csv header");
      header = false;
      return;
    }
    if (cols.size() != 7) throw ParseError(line, fmt::format("expected 7 columns, got {}", cols.size()));
    const auto id = detail::parse_number<long long>(cols[0]);
    double xy[4];
    for (int i = 0; i < 4; ++i) {
      const auto v = detail::parse_number<double>(cols[static_cast<std::size_t>(1 + i)]);
      if (!v) throw ParseError(line, "malformed coordinate");
      xy[i] = *v;
    }
    const auto samples = detail::parse_number<long long>(cols[6]);
    if (!id || !samples || *samples < 0) throw ParseError(line, "malformed edge id or sample count");
    std::string mean = "NA";
    if (*samples > 0) {
      const auto m = detail::parse_number<double>(cols[5]);
      if (!m) throw ParseError(line, "malformed mean speed");
      mean = fmt::format("{}", *m);
    } else if (detail::trim(cols[5]) != "NA") {
      throw ParseError(line, "edge without samples must carry NA");
    }
    out += fmt::format("{},{},{},{},{}\n", *id, 0.5 * (xy[0] + xy[2]), 0.5 * (xy[1] + xy[3]), mean, *samples);
  });
  if (header) throw ParseError(0, "empty edge_speeds input");
  return out;
}

SummaryRow parse_summary_csv(std::string_view text) {
  SummaryRow row;
  int data_lines = 0;
  detail::for_each_line(text, [&](std::size_t line, std::string_view content) {
    if (content.starts_with("mean_travel_time")) return;
    const auto cols = detail::split(content, ',');
    if (cols.size() != 7) throw ParseError(line, "expected 7 summary columns");
    const auto mtt = detail::parse_number<double>(cols[0]);
    const auto fuel = detail::parse_number<double>(cols[1]);
    const auto co2 = detail::parse_number<double>(cols[2]);
    const auto ttc = detail::parse_number<long long>(cols[3]);
    const auto pet = detail::parse_number<long long>(cols[4]);
    const auto fin = detail::parse_number<long long>(cols[5]);
    const auto unf = detail::parse_number<long long>(cols[6]);
    if (!mtt || !fuel || !co2 || !ttc || !pet || !fin || !unf) throw ParseError(line, "malformed summary row");
    row = {*mtt, *fuel, *co2, *ttc, *pet, *fin, *unf};
    ++data_lines;
  });
  if (data_lines != 1) throw ParseError(0, "summary.csv must hold exactly one data row");
  return row;
}

void write_text_file(const std::string& path, std::string_view content) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write file: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ConfigError("failed writing file: " + path);
}

}  // namespace nrcsim
