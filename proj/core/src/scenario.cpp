#include "nrcsim/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

#include "nrcsim/error.hpp"
#include "text_util.hpp"

namespace nrcsim {

namespace {

std::string resolve(const std::string& base_dir, std::string_view path) {
  std::filesystem::path p{std::string(path)};
  if (p.is_absolute()) return p.string();
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

double as_double(std::size_t line, std::string_view key, std::string_view value) {
  const auto v = detail::parse_number<double>(value);
  if (!v || !std::isfinite(*v)) throw ParseError(line, fmt::format("{}: expected a number, got '{}'", key, value));
  return *v;
}

long long as_int(std::size_t line, std::string_view key, std::string_view value) {
  const auto v = detail::parse_number<long long>(value);
  if (!v) throw ParseError(line, fmt::format("{}: expected an integer, got '{}'", key, value));
  return *v;
}

bool as_bool(std::size_t line, std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ParseError(line, fmt::format("{}: expected true/false, got '{}'", key, value));
}

ReroutePolicy as_policy(std::size_t line, std::string_view key, std::string_view value, double sign_distance) {
  if (value == "immediate") return ReroutePolicy::immediate();
  if (value == "junction") return ReroutePolicy::at_junction(sign_distance);
  throw ParseError(line, fmt::format("{}: expected 'immediate' or 'junction', got '{}'", key, value));
}

void parse_closure_edges(std::size_t line, std::string_view value, ClosureSpec& spec) {
  spec.edge_ids.clear();
  spec.central_links = 0;
  if (value == "central") {
    spec.central_links = 1;
    return;
  }
  if (value.starts_with("central:")) {
    const auto k = as_int(line, "closure.edges", value.substr(8));
    if (k < 1) throw ParseError(line, "closure.edges: central link count must be >= 1");
    spec.central_links = static_cast<int>(k);
    return;
  }
  for (const auto part : detail::split(value, ',')) {
    spec.edge_ids.push_back(as_int(line, "closure.edges", part));
  }
  if (spec.edge_ids.empty()) throw ParseError(line, "closure.edges: no edges given");
}

}  // namespace

ScenarioConfig parse_scenario_config(std::string_view text, const std::string& base_dir) {
  ScenarioConfig cfg;
  std::optional<ClosureSpec> keyed_closure;
  std::string hdv_policy = "junction";
  std::string cav_policy = "immediate";
  std::size_t hdv_policy_line = 0;
  std::size_t cav_policy_line = 0;
  double sign_distance = cfg.params.hdv_policy.sign_distance;

  using Setter = std::function<void(std::size_t, std::string_view, std::string_view)>;
  auto num = [](double& field) -> Setter {
    return [&field](std::size_t l, std::string_view k, std::string_view v) { field = as_double(l, k, v); };
  };
  auto integer = [](int& field) -> Setter {
    return [&field](std::size_t l, std::string_view k, std::string_view v) {
      field = static_cast<int>(as_int(l, k, v));
    };
  };
  auto seed = [](std::uint64_t& field) -> Setter {
    return [&field](std::size_t l, std::string_view k, std::string_view v) {
      const auto s = detail::parse_number<std::uint64_t>(v);
      if (!s) throw ParseError(l, fmt::format("{}: expected a non-negative integer, got '{}'", k, v));
      field = *s;
    };
  };
  auto closure_field = [&](auto member) -> Setter {
    return [&, member](std::size_t l, std::string_view k, std::string_view v) {
      if (!keyed_closure) keyed_closure.emplace();
      member(*keyed_closure, l, k, v);
    };
  };

  auto& p = cfg.params;
  const std::map<std::string, Setter, std::less<>> setters = {
      {"network.file", [&](std::size_t, std::string_view, std::string_view v) { cfg.network.file = resolve(base_dir, v); }},
      {"network.rows", integer(cfg.network.rows)},
      {"network.cols", integer(cfg.network.cols)},
      {"network.edge_length", num(cfg.network.edge_length)},
      {"network.speed_limit", num(cfg.network.speed_limit)},
      {"network.lanes", integer(cfg.network.lanes)},
      {"demand.vehicles", integer(cfg.demand.total_vehicles)},
      {"demand.horizon", num(cfg.demand.horizon)},
      {"demand.penetration", num(cfg.demand.penetration)},
      {"demand.seed", seed(cfg.demand.seed)},
      {"demand.trips_file", [&](std::size_t, std::string_view, std::string_view v) { cfg.trips_file = resolve(base_dir, v); }},
      {"krauss.accel", num(p.krauss.accel)},
      {"krauss.decel", num(p.krauss.decel)},
      {"krauss.tau", num(p.krauss.tau)},
      {"krauss.sigma", num(p.krauss.sigma)},
      {"krauss.v_max", num(p.krauss.v_max)},
      {"krauss.min_gap", num(p.krauss.min_gap)},
      {"krauss.length", num(p.krauss.length)},
      {"idm.accel", num(p.idm.accel)},
      {"idm.decel", num(p.idm.decel)},
      {"idm.T", num(p.idm.T)},
      {"idm.s0", num(p.idm.s0)},
      {"idm.delta", num(p.idm.delta)},
      {"idm.v_max", num(p.idm.v_max)},
      {"idm.length", num(p.idm.length)},
      {"routing.hdv_policy", [&](std::size_t l, std::string_view, std::string_view v) { hdv_policy = v; hdv_policy_line = l; }},
      {"routing.cav_policy", [&](std::size_t l, std::string_view, std::string_view v) { cav_policy = v; cav_policy_line = l; }},
      {"routing.hdv_sign_distance", num(sign_distance)},
      {"closure.edges", closure_field([](ClosureSpec& c, std::size_t l, std::string_view, std::string_view v) {
         parse_closure_edges(l, v, c);
       })},
      {"closure.start", closure_field([](ClosureSpec& c, std::size_t l, std::string_view k, std::string_view v) {
         c.start = as_double(l, k, v);
       })},
      {"closure.end", closure_field([](ClosureSpec& c, std::size_t l, std::string_view k, std::string_view v) {
         c.end = as_double(l, k, v);
       })},
      {"engine.dt", num(cfg.engine.dt)},
      {"engine.end_time", num(cfg.engine.end_time)},
      {"engine.seed", seed(cfg.engine.seed)},
      {"engine.insertion_min_gap", num(cfg.engine.insertion_min_gap)},
      {"engine.strict", [&](std::size_t l, std::string_view k, std::string_view v) { cfg.engine.strict = as_bool(l, k, v); }},
      {"metrics.ttc_hdv", num(p.ttc.hdv)},
      {"metrics.ttc_cav", num(p.ttc.cav)},
      {"metrics.pet_threshold", num(p.pet_threshold)},
      {"metrics.co2_per_liter", num(p.co2_per_liter)},
      {"metrics.fuel_c0", num(p.fuel.c0)},
      {"metrics.fuel_c1", num(p.fuel.c1)},
      {"metrics.fuel_c2", num(p.fuel.c2)},
      {"metrics.fuel_c3", num(p.fuel.c3)},
      {"metrics.fuel_c4", num(p.fuel.c4)},
      {"metrics.fuel_c5", num(p.fuel.c5)},
      {"output.dir", [&](std::size_t, std::string_view, std::string_view v) { cfg.output_dir = resolve(base_dir, v); }},
  };

  detail::for_each_line(text, [&](std::size_t line, std::string_view content) {
    // Record form: closure edges=<ids> start=<s> end=<e>
    if (content.starts_with("closure ") || content.starts_with("closure\t")) {
      ClosureSpec spec;
      bool has_edges = false;
      const auto tokens = detail::split_ws(content.substr(8));
      for (const auto tok : tokens) {
        const auto eq = tok.find('=');
        if (eq == std::string_view::npos) throw ParseError(line, fmt::format("closure: expected key=value, got '{}'", tok));
        const auto k = tok.substr(0, eq);
        const auto v = tok.substr(eq + 1);
        if (k == "edges") {
          parse_closure_edges(line, v, spec);
          has_edges = true;
        } else if (k == "start") {
          spec.start = as_double(line, "closure start", v);
        } else if (k == "end") {
          spec.end = as_double(line, "closure end", v);
        } else {
          throw ParseError(line, fmt::format("closure: unknown field '{}'", k));
        }
      }
      if (!has_edges) throw ParseError(line, "closure: missing edges=");
      if (!(spec.start >= 0.0 && spec.end > spec.start)) throw ParseError(line, "closure: need 0 <= start < end");
      cfg.closures.push_back(spec);
      return;
    }
    const auto eq = content.find('=');
    if (eq == std::string_view::npos) throw ParseError(line, fmt::format("expected 'section.key = value', got '{}'", content));
    const auto key = detail::trim(content.substr(0, eq));
    const auto value = detail::trim(content.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ParseError(line, fmt::format("unknown key '{}'", key));
    if (value.empty()) throw ParseError(line, fmt::format("{}: missing value", key));
    it->second(line, key, value);
  });

  cfg.params.hdv_policy = as_policy(hdv_policy_line, "routing.hdv_policy", hdv_policy, sign_distance);
  cfg.params.cav_policy = as_policy(cav_policy_line, "routing.cav_policy", cav_policy, sign_distance);
  if (keyed_closure) {
    if (keyed_closure->edge_ids.empty() && keyed_closure->central_links == 0) {
      throw ParseError(0, "closure.start/closure.end given without closure.edges");
    }
    if (!(keyed_closure->start >= 0.0 && keyed_closure->end > keyed_closure->start)) {
      throw ParseError(0, "closure window needs 0 <= start < end");
    }
    cfg.closures.insert(cfg.closures.begin(), *keyed_closure);
  }
  if (!(cfg.demand.penetration >= 0.0 && cfg.demand.penetration <= 1.0)) {
    throw ParseError(0, "demand.penetration must lie in [0, 1]");
  }
  if (cfg.demand.total_vehicles < 0) throw ParseError(0, "demand.vehicles must be >= 0");
  return cfg;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  const auto base = std::filesystem::path(path).parent_path().string();
  return parse_scenario_config(detail::read_file(path), base.empty() ? "." : base);
}

Scenario build_scenario(const ScenarioConfig& config) {
  Scenario s;
  try {
    if (config.network.file) {
      s.network = load_network_file(*config.network.file);
    } else {
      s.network = build_grid(config.network.rows, config.network.cols, config.network.edge_length,
                             config.network.speed_limit, config.network.lanes);
    }
    if (s.network.empty()) throw ConfigError("network has no nodes");
    if (config.trips_file) {
      s.trips = load_trips(detail::read_file(*config.trips_file));
    } else {
      s.trips = generate_trips(s.network, config.demand);
    }
    for (const auto& c : config.closures) {
      ClosureEvent ev;
      ev.start = c.start;
      ev.end = c.end;
      ev.edge_ids = c.central_links > 0 ? central_edges(s.network, c.central_links) : c.edge_ids;
      s.events.push_back(std::move(ev));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  s.params = config.params;
  s.engine = config.engine;
  validate_scenario(s);
  return s;
}

}  // namespace nrcsim
