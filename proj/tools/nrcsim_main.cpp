// nrcsim: run closure scenarios, ORG/NRC comparisons, penetration sweeps, and
// heatmap exports from the command line.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nrcsim/error.hpp"
#include "nrcsim/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Microscopic traffic simulator for road-closure scenarios with mixed HDV/CAV fleets"};
  app.require_subcommand(1);

  nrcsim::SimulateOptions sim;
  std::uint64_t seed = 0;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "Run one scenario and write trips/edge_speeds/summary/safety CSVs");
  simulate->add_option("--config", sim.config_path, "Scenario config file")->required();
  auto* seed_opt = simulate->add_option("--seed", seed, "Override demand and engine seeds");
  auto* out_opt = simulate->add_option("--out", sim_out, "Output directory (default: output.dir from config)");
  simulate->add_flag("--strict", sim.strict, "Abort on the first integrity fault (exit 2)");

  nrcsim::CompareOptions cmp;
  std::string cmp_pen = "0,100";
  auto* compare = app.add_subcommand("compare", "Run ORG/NRC x HDV/CAV and write table.csv");
  compare->add_option("--org", cmp.org_config, "Config without closures")->required();
  compare->add_option("--nrc", cmp.nrc_config, "Config with closures")->required();
  compare->add_option("--out", cmp.out_dir, "Output directory")->required();
  compare->add_option("--penetration", cmp_pen, "HDV-case and CAV-case penetration in percent");
  compare->add_option("--jobs", cmp.jobs, "Parallel runs")->check(CLI::PositiveNumber);

  nrcsim::SweepOptions swp;
  std::string swp_pen = "0,25,50,75,100";
  auto* sweep = app.add_subcommand("sweep", "Run one scenario per CAV penetration and write sweep.csv");
  sweep->add_option("--config", swp.config_path, "Scenario config file")->required();
  sweep->add_option("--penetration", swp_pen, "Comma separated percentages");
  sweep->add_option("--out", swp.out_dir, "Output directory")->required();
  sweep->add_option("--jobs", swp.jobs, "Parallel runs")->check(CLI::PositiveNumber);

  nrcsim::HeatmapOptions hm;
  auto* heatmap = app.add_subcommand("heatmap", "Convert edge_speeds.csv into per-edge midpoints for plotting");
  heatmap->add_option("--in", hm.in_path, "edge_speeds.csv")->required();
  heatmap->add_option("--out", hm.out_path, "heatmap.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : nrcsim::kExitConfigError;
  }

  try {
    if (*simulate) {
      if (*seed_opt) sim.seed = seed;
      if (*out_opt) sim.out_dir = sim_out;
      return nrcsim::cmd_simulate(sim, std::cout, std::cerr);
    }
    if (*compare) {
      cmp.penetration = nrcsim::parse_penetration_list(cmp_pen);
      return nrcsim::cmd_compare(cmp, std::cout, std::cerr);
    }
    if (*sweep) {
      swp.penetration = nrcsim::parse_penetration_list(swp_pen);
      return nrcsim::cmd_sweep(swp, std::cout, std::cerr);
    }
    if (*heatmap) return nrcsim::cmd_heatmap(hm, std::cout, std::cerr);
  } catch (const nrcsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return nrcsim::kExitConfigError;
  }
  return nrcsim::kExitConfigError;
}
