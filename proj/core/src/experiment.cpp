#include "nrcsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "nrcsim/csv_output.hpp"
#include "nrcsim/error.hpp"
#include "text_util.hpp"

namespace nrcsim {

namespace {

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string point_dir_name(double pct) {
  return fmt::format("p{:05.1f}", pct);
}

/// Runs `body` and maps exceptions onto exit codes.
template <typename Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const IntegrityFault& e) {
    err << "integrity fault: " << e.what() << '\n';
    return kExitIntegrityFault;
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::out_of_range& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config) {
  Scenario scenario = build_scenario(config);
  RunResult result;
  result.trips = scenario.trips;
  Simulation sim(std::move(scenario));
  while (!sim.done()) sim.step();
  result.network = sim.network();
  result.output = sim.finish();
  result.summary = summarize(result.output);
  return result;
}

void write_run_outputs(const std::string& dir, const RunResult& result) {
  write_text_file(join(dir, "trips.csv"), trips_csv(result.output));
  write_text_file(join(dir, "edge_speeds.csv"), edge_speeds_csv(result.network, result.output.edge_speeds));
  write_text_file(join(dir, "summary.csv"), summary_csv(result.summary));
  write_text_file(join(dir, "safety.csv"), safety_csv(result.output));
}

std::vector<RunResult> run_many(const std::vector<ScenarioConfig>& configs, int jobs) {
  std::vector<RunResult> results(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        results[i] = run_scenario(configs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n = static_cast<std::size_t>(std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(1, configs.size()))));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::vector<double> parse_penetration_list(const std::string& text) {
  std::vector<double> out;
  for (const auto part : detail::split(text, ',')) {
    const auto v = detail::parse_number<double>(part);
    if (!v || !(*v >= 0.0 && *v <= 100.0)) {
      throw ConfigError(fmt::format("penetration '{}' is not a percentage in [0, 100]", part));
    }
    out.push_back(*v);
  }
  if (out.empty()) throw ConfigError("empty penetration list");
  return out;
}

std::string comparison_table_csv(const SummaryRow& org, const SummaryRow& nrc, const SummaryRow& org_cav,
                                 const SummaryRow& nrc_cav) {
  std::string out = "case,mean_travel_time,fuel,co2,ttc\n";
  out += fmt::format("ORG,{},{},{},{}\n", org.mean_travel_time, org.fuel, org.co2, org.ttc_count);
  auto row = [&](std::string_view name, const SummaryRow& r) {
    const auto pct = percent_change(r, org);
    out += fmt::format("{},{},{},{},{}\n", name, format_percent(pct.mean_travel_time), format_percent(pct.fuel),
                       format_percent(pct.co2), format_percent(pct.ttc_count));
  };
  row("NRC", nrc);
  row("ORG(CAV)", org_cav);
  row("NRC(CAV)", nrc_cav);
  return out;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::string out = "penetration,mean_travel_time,fuel,co2,ttc\n";
  for (const auto& p : points) {
    out += fmt::format("{},{},{},{},{}\n", p.penetration, p.summary.mean_travel_time, p.summary.fuel, p.summary.co2,
                       p.summary.ttc_count);
  }
  return out;
}

int cmd_simulate(const SimulateOptions& options, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    auto config = load_scenario_config(options.config_path);
    if (options.seed) {
      config.demand.seed = *options.seed;
      config.engine.seed = *options.seed;
    }
    if (options.strict) config.engine.strict = true;
    const std::string out = options.out_dir.value_or(config.output_dir);
    const auto result = run_scenario(config);
    write_run_outputs(out, result);
    const auto& s = result.summary;
    log << fmt::format("simulated {} vehicles: mean travel time {:.2f} s, fuel {:.2f} l, co2 {:.2f} kg, ttc {}, "
                       "unfinished {}\n",
                       result.trips.size(), s.mean_travel_time, s.fuel, s.co2, s.ttc_count, s.unfinished);
    if (result.output.integrity_faults > 0) {
      err << "warning: " << result.output.integrity_faults << " integrity faults (permissive mode)\n";
    }
    log << "wrote " << out << '\n';
    return static_cast<int>(kExitOk);
  });
}

int cmd_compare(const CompareOptions& options, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    if (options.penetration.size() != 2) throw ConfigError("compare needs exactly two penetration values");
    const auto org = load_scenario_config(options.org_config);
    const auto nrc = load_scenario_config(options.nrc_config);
    std::vector<ScenarioConfig> cases = {org, nrc, org, nrc};
    cases[0].demand.penetration = cases[1].demand.penetration = options.penetration[0] / 100.0;
    cases[2].demand.penetration = cases[3].demand.penetration = options.penetration[1] / 100.0;
    const auto results = run_many(cases, options.jobs);

    static constexpr const char* kDirs[] = {"org", "nrc", "org_cav", "nrc_cav"};
    for (std::size_t i = 0; i < results.size(); ++i) write_run_outputs(join(options.out_dir, kDirs[i]), results[i]);
    const auto table = comparison_table_csv(results[0].summary, results[1].summary, results[2].summary,
                                            results[3].summary);
    write_text_file(join(options.out_dir, "table.csv"), table);
    log << table;
    return static_cast<int>(kExitOk);
  });
}

int cmd_sweep(const SweepOptions& options, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const auto base = load_scenario_config(options.config_path);
    auto pens = options.penetration;
    for (const double p : pens) {
      if (!(p >= 0.0 && p <= 100.0)) throw ConfigError(fmt::format("penetration {} outside [0, 100]", p));
    }
    std::sort(pens.begin(), pens.end());
    pens.erase(std::unique(pens.begin(), pens.end()), pens.end());

    std::vector<ScenarioConfig> configs(pens.size(), base);
    for (std::size_t i = 0; i < pens.size(); ++i) configs[i].demand.penetration = pens[i] / 100.0;
    const auto results = run_many(configs, options.jobs);

    std::vector<SweepPoint> points;
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto dir = join(options.out_dir, point_dir_name(pens[i]));
      write_run_outputs(dir, results[i]);
      write_text_file(join(dir, "demand.trips"), save_trips(results[i].trips));
      points.push_back({pens[i], results[i].summary});
    }
    const auto csv = sweep_csv(points);
    write_text_file(join(options.out_dir, "sweep.csv"), csv);
    log << csv;
    return static_cast<int>(kExitOk);
  });
}

int cmd_heatmap(const HeatmapOptions& options, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const auto csv = heatmap_csv(detail::read_file(options.in_path));
    write_text_file(options.out_path, csv);
    log << "wrote " << options.out_path << '\n';
    return static_cast<int>(kExitOk);
  });
}

}  // namespace nrcsim
