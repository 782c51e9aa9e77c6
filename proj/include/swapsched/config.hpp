#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "swapsched/detail/text.hpp"
#include "swapsched/experiments.hpp"
#include "swapsched/forecast.hpp"
#include "swapsched/topology.hpp"
#include "swapsched/traffic.hpp"

namespace swapsched {

/// Raised for anything wrong with configuration or usage, as opposed to a
/// failure while executing a valid request. The CLI maps this to exit 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat experiment configuration, loaded from an INI-style file with
/// sections, then overridable via "section.key=value" flags. Defaults
/// describe the stock 12-station synthetic scenario.
struct RunConfig {
  // [topology]
  std::string topology_path;          // when set, load from file
  std::string topology_kind = "ring"; // otherwise generate: ring | path
  int stations = 12;
  // [traffic]
  std::string traffic_source = "synthetic";  // synthetic | csv
  std::string traffic_csv;
  double swap_rate = 0.1;  // edge-traffic to swap-demand conversion
  int days = 4;
  SeasonalitySpec seasonality;
  // [fleet]
  FleetConfig fleet;
  int allocation_horizon = 6;
  // [policy]
  int h = 6;
  std::string forecaster = "noisy-oracle";
  double noise = 0.15;
  double noise_step_growth = 0.0;
  int average_window = 0;
  std::string forecast_file;
  // [run]
  int test_start_hour = 25;
  int hours = 72;
  std::uint64_t seed = 1;
  int repetitions = 20;
  std::string output_dir;
  int threads = 0;  // 0 = hardware default
  // [shift]
  double shift_fraction = 0.3;
  int shift_hours = 0;
};

namespace detail {

using IniTable = std::map<std::string, std::map<std::string, std::string>>;

inline IniTable parse_ini(std::istream& in, const std::string& source) {
  IniTable table;
  std::string raw, section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(source + ":" + std::to_string(line_no) +
                          ": unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty())
        throw ConfigError(source + ":" + std::to_string(line_no) + ": empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(source + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty())
      throw ConfigError(source + ":" + std::to_string(line_no) + ": empty key");
    if (section.empty())
      throw ConfigError(source + ":" + std::to_string(line_no) +
                        ": key '" + key + "' outside any [section]");
    if (!table[section].emplace(key, value).second)
      throw ConfigError(source + ":" + std::to_string(line_no) + ": duplicate key '" +
                        section + "." + key + "'");
  }
  return table;
}

inline void apply_override(IniTable& table, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + assignment + "' must look like section.key=value");
  const std::string path(trim(std::string_view(assignment).substr(0, eq)));
  const std::string value(trim(std::string_view(assignment).substr(eq + 1)));
  const std::size_t dot = path.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == path.size())
    throw ConfigError("override '" + assignment + "' must look like section.key=value");
  table[path.substr(0, dot)][path.substr(dot + 1)] = value;
}

}  // namespace detail

/// Turns a parsed INI table into a validated RunConfig. Unknown sections or
/// keys are errors (they are almost always typos), as are out-of-range
/// values and referenced files that do not exist.
inline RunConfig run_config_from_table(const detail::IniTable& table) {
  RunConfig cfg;
  const auto to_int = [](const std::string& v, const std::string& what) {
    try {
      return detail::parse_int(v, what);
    } catch (const std::runtime_error& e) {
      throw ConfigError(e.what());
    }
  };
  const auto to_double = [](const std::string& v, const std::string& what) {
    try {
      return detail::parse_double(v, what);
    } catch (const std::runtime_error& e) {
      throw ConfigError(e.what());
    }
  };

  for (const auto& [section, entries] : table) {
    for (const auto& [key, value] : entries) {
      const std::string where = section + "." + key;
      if (section == "topology") {
        if (key == "path") cfg.topology_path = value;
        else if (key == "generate") cfg.topology_kind = value;
        else if (key == "stations") cfg.stations = static_cast<int>(to_int(value, where));
        else throw ConfigError("unknown config key '" + where + "'");
      } else if (section == "traffic") {
        if (key == "source") cfg.traffic_source = value;
        else if (key == "csv") cfg.traffic_csv = value;
        else if (key == "swap_rate") cfg.swap_rate = to_double(value, where);
        else if (key == "days") cfg.days = static_cast<int>(to_int(value, where));
        else if (key == "base_level") cfg.seasonality.base_level = to_double(value, where);
        else if (key == "base_spread") cfg.seasonality.base_spread = to_double(value, where);
        else if (key == "amplitude") cfg.seasonality.amplitude = to_double(value, where);
        else if (key == "peak_hour") cfg.seasonality.peak_hour = to_double(value, where);
        else if (key == "peak_spread_hours")
          cfg.seasonality.peak_spread_hours = to_double(value, where);
        else if (key == "peak_width_hours")
          cfg.seasonality.peak_width_hours = to_double(value, where);
        else if (key == "noise") cfg.seasonality.noise = to_double(value, where);
        else throw ConfigError("unknown config key '" + where + "'");
      } else if (section == "fleet") {
        if (key == "inventory_level") cfg.fleet.inventory_level = to_double(value, where);
        else if (key == "mobile_ratio") cfg.fleet.mobile_ratio = to_double(value, where);
        else if (key == "allocation_horizon")
          cfg.allocation_horizon = static_cast<int>(to_int(value, where));
        else throw ConfigError("unknown config key '" + where + "'");
      } else if (section == "policy") {
        if (key == "h") cfg.h = static_cast<int>(to_int(value, where));
        else if (key == "forecaster") cfg.forecaster = value;
        else if (key == "noise") cfg.noise = to_double(value, where);
        else if (key == "noise_step_growth") cfg.noise_step_growth = to_double(value, where);
        else if (key == "average_window")
          cfg.average_window = static_cast<int>(to_int(value, where));
        else if (key == "forecast_file") cfg.forecast_file = value;
        else throw ConfigError("unknown config key '" + where + "'");
      } else if (section == "run") {
        if (key == "test_start_hour")
          cfg.test_start_hour = static_cast<int>(to_int(value, where));
        else if (key == "hours") cfg.hours = static_cast<int>(to_int(value, where));
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(value, where));
        else if (key == "repetitions")
          cfg.repetitions = static_cast<int>(to_int(value, where));
        else if (key == "output_dir") cfg.output_dir = value;
        else if (key == "threads") cfg.threads = static_cast<int>(to_int(value, where));
        else throw ConfigError("unknown config key '" + where + "'");
      } else if (section == "shift") {
        if (key == "fraction") cfg.shift_fraction = to_double(value, where);
        else if (key == "hours") cfg.shift_hours = static_cast<int>(to_int(value, where));
        else throw ConfigError("unknown config key '" + where + "'");
      } else {
        throw ConfigError("unknown config section '" + section + "'");
      }
    }
  }
  return cfg;
}

inline void validate_run_config(const RunConfig& cfg) {
  try {
    if (cfg.topology_path.empty()) {
      if (cfg.topology_kind != "ring" && cfg.topology_kind != "path")
        throw ConfigError("topology.generate must be 'ring' or 'path'");
      if (cfg.stations < 1) throw ConfigError("topology.stations must be >= 1");
    } else if (!std::filesystem::exists(cfg.topology_path)) {
      throw ConfigError("topology file not found: '" + cfg.topology_path + "'");
    }
    if (cfg.traffic_source != "synthetic" && cfg.traffic_source != "csv")
      throw ConfigError("traffic.source must be 'synthetic' or 'csv'");
    if (cfg.traffic_source == "csv") {
      if (cfg.traffic_csv.empty())
        throw ConfigError("traffic.source = csv requires traffic.csv");
      if (!std::filesystem::exists(cfg.traffic_csv))
        throw ConfigError("traffic file not found: '" + cfg.traffic_csv + "'");
    }
    if (!(cfg.swap_rate >= 0 && cfg.swap_rate <= 1))
      throw ConfigError("traffic.swap_rate must be in [0,1]");
    if (cfg.days < 1) throw ConfigError("traffic.days must be >= 1");
    cfg.seasonality.validate();
    cfg.fleet.validate();
    if (cfg.allocation_horizon < 1 || cfg.allocation_horizon > 24)
      throw ConfigError("fleet.allocation_horizon must be in [1,24]");
    if (cfg.h < 1 || cfg.h > 24) throw ConfigError("policy.h must be in [1,24]");
    parse_forecaster_kind(cfg.forecaster);
    if (!(cfg.noise >= 0)) throw ConfigError("policy.noise must be >= 0");
    if (!(cfg.noise_step_growth >= 0))
      throw ConfigError("policy.noise_step_growth must be >= 0");
    if (cfg.average_window < 0) throw ConfigError("policy.average_window must be >= 0");
    if (cfg.forecaster == "external") {
      if (cfg.forecast_file.empty())
        throw ConfigError("policy.forecaster = external requires policy.forecast_file");
      if (!std::filesystem::exists(cfg.forecast_file))
        throw ConfigError("forecast file not found: '" + cfg.forecast_file + "'");
    }
    if (cfg.test_start_hour < 1) throw ConfigError("run.test_start_hour must be >= 1");
    if (cfg.hours < 1) throw ConfigError("run.hours must be >= 1");
    if (cfg.repetitions < 1) throw ConfigError("run.repetitions must be >= 1");
    if (!(cfg.shift_fraction >= 0 && cfg.shift_fraction <= 1))
      throw ConfigError("shift.fraction must be in [0,1]");
    if (cfg.shift_hours < 0 || cfg.shift_hours >= 24)
      throw ConfigError("shift.hours must be in [0,24)");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

/// Loads, overrides, and validates a config. An empty path yields the
/// defaults (overrides still apply).
inline RunConfig load_run_config(const std::string& path,
                                 const std::vector<std::string>& overrides = {}) {
  detail::IniTable table;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    table = detail::parse_ini(in, path);
  }
  for (const auto& o : overrides) detail::apply_override(table, o);
  const RunConfig cfg = run_config_from_table(table);
  validate_run_config(cfg);
  return cfg;
}

/// The station graph a config describes: an explicit file wins over the
/// generated shapes.
inline Topology build_topology(const RunConfig& cfg, std::ostream* warn = nullptr) {
  if (!cfg.topology_path.empty()) return load_topology(cfg.topology_path, warn);
  if (cfg.topology_kind == "ring") return make_ring(cfg.stations);
  return make_path(cfg.stations);
}

/// Realized station demand per the config: synthetic generation (with the
/// configured shift applied) or a CSV, converting edge traffic to station
/// demand via swap_rate when needed. `repetition` selects the seed stream
/// for synthetic data so sweeps can pair repetitions across axis values.
inline TrafficSeries build_demand(const RunConfig& cfg, const Topology& topo,
                                  int repetition = 0) {
  TrafficSeries demand;
  if (cfg.traffic_source == "synthetic") {
    const std::uint64_t rep_seed = detail::hash3(cfg.seed, 0xa11, repetition);
    demand = generate_synthetic(topo, cfg.days, detail::hash2(rep_seed, 1),
                                cfg.seasonality);
    if (cfg.shift_hours > 0 && cfg.shift_fraction > 0) {
      ShiftSpec shift;
      shift.stations = detail::pick_shifted_stations(
          topo.station_count(), cfg.shift_fraction, detail::hash2(rep_seed, 2));
      shift.shift_hours = cfg.shift_hours;
      demand = apply_shift(demand, shift);
    }
  } else {
    demand = load_traffic_csv(cfg.traffic_csv);
    if (demand.kind == SeriesKind::kEdgeTraffic)
      demand = edge_to_station_demand(demand, topo, cfg.swap_rate);
    else if (demand.series_count != topo.station_count())
      throw std::runtime_error("traffic file has " +
                               std::to_string(demand.series_count) +
                               " stations but topology has " +
                               std::to_string(topo.station_count()));
  }
  return demand;
}

inline ForecasterSpec forecaster_from(const RunConfig& cfg, std::uint64_t forecast_seed) {
  ForecasterSpec fs;
  fs.kind = parse_forecaster_kind(cfg.forecaster);
  fs.noise = cfg.noise;
  fs.noise_step_growth = cfg.noise_step_growth;
  fs.seed = forecast_seed;
  fs.average_window = cfg.average_window;
  fs.path = cfg.forecast_file;
  return fs;
}

/// Scenario for sweeps; only synthetic traffic can be swept, because each
/// repetition needs its own demand realization.
inline ScenarioConfig to_scenario(const RunConfig& cfg) {
  if (cfg.traffic_source != "synthetic")
    throw ConfigError("sweeps require traffic.source = synthetic");
  ScenarioConfig scn;
  scn.topo = build_topology(cfg);
  scn.traffic = cfg.seasonality;
  scn.days = cfg.days;
  scn.test_start_hour = cfg.test_start_hour;
  scn.hours = cfg.hours;
  scn.fleet = cfg.fleet;
  scn.h = cfg.h;
  scn.allocation_horizon = cfg.allocation_horizon;
  scn.forecast_noise = cfg.noise;
  scn.noise_step_growth = cfg.noise_step_growth;
  scn.shift_fraction = cfg.shift_fraction;
  scn.shift_hours = cfg.shift_hours;
  scn.seed = cfg.seed;
  scn.validate();
  return scn;
}

}  // namespace swapsched
