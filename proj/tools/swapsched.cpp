// swapsched: synthetic data generation, single scenario runs, experiment
// sweeps, and trace inspection for the mobile battery-swap scheduling
// library. Machine-readable outputs go to files in the output directory;
// stdout carries a short human summary, stderr carries diagnostics.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "swapsched/config.hpp"
#include "swapsched/report.hpp"

namespace fs = std::filesystem;
using namespace swapsched;

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config_path, "INI config file");
  cmd->add_option("-s,--set", args.overrides,
                  "override a config value, e.g. --set run.hours=48");
  cmd->add_option("-o,--output-dir", args.output_dir,
                  "output directory (default: config, then $SWAPSCHED_OUTPUT_DIR, then .)");
}

fs::path resolve_output_dir(const CommonArgs& args, const RunConfig& cfg) {
  std::string dir = args.output_dir;
  if (dir.empty()) dir = cfg.output_dir;
  if (dir.empty())
    if (const char* env = std::getenv("SWAPSCHED_OUTPUT_DIR")) dir = env;
  if (dir.empty()) dir = ".";
  fs::create_directories(dir);
  return dir;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

int cmd_generate(const CommonArgs& args) {
  const RunConfig cfg = load_run_config(args.config_path, args.overrides);
  if (cfg.traffic_source != "synthetic")
    throw ConfigError("generate requires traffic.source = synthetic");
  const fs::path out_dir = resolve_output_dir(args, cfg);

  const Topology topo = build_topology(cfg, &std::cerr);
  const TrafficSeries demand = build_demand(cfg, topo);

  const fs::path topo_path = out_dir / "topology.txt";
  const fs::path traffic_path = out_dir / "traffic.csv";
  {
    auto out = open_output(topo_path);
    save_topology(topo, out);
  }
  {
    auto out = open_output(traffic_path);
    save_traffic_csv(demand, out);
  }
  std::cout << "wrote " << topo_path.string() << " (" << topo.station_count()
            << " stations, " << topo.edges().size() << " edges)\n";
  std::cout << "wrote " << traffic_path.string() << " (" << demand.horizon
            << " hours, total demand " << demand.total() << ")\n";
  return 0;
}

int cmd_run(const CommonArgs& args) {
  const RunConfig cfg = load_run_config(args.config_path, args.overrides);
  const fs::path out_dir = resolve_output_dir(args, cfg);

  const Topology topo = build_topology(cfg, &std::cerr);
  const TrafficSeries demand = build_demand(cfg, topo);
  if (cfg.test_start_hour + cfg.hours - 1 > demand.horizon)
    throw ConfigError("test window [" + std::to_string(cfg.test_start_hour) + "," +
                      std::to_string(cfg.test_start_hour + cfg.hours - 1) +
                      "] exceeds the demand horizon " + std::to_string(demand.horizon));

  const std::vector<double> avg = mean_per_series(demand, cfg.test_start_hour, cfg.hours);
  const FleetSize size = cfg.fleet.derive(avg);
  const std::vector<int> fixed = allocate_fixed(avg, size.fixed_total);

  const std::uint64_t rep_seed = swapsched::detail::hash3(cfg.seed, 0xa11, 0);
  const ForecasterSpec fs_spec =
      forecaster_from(cfg, swapsched::detail::hash2(rep_seed, 3));
  const int h_alloc = std::min(cfg.allocation_horizon, cfg.hours);
  const ForecastWindow window =
      predict(fs_spec, demand.prefix(cfg.test_start_hour - 1), &demand, h_alloc);
  std::vector<int> alloc_demand(static_cast<std::size_t>(h_alloc) * topo.station_count());
  for (int t = 1; t <= h_alloc; ++t)
    for (int i = 0; i < topo.station_count(); ++i)
      alloc_demand[static_cast<std::size_t>(t - 1) * topo.station_count() + i] =
          round_half_up(window.at(t, i));
  const std::vector<int> mobile = allocate_mobile_initial(topo, h_alloc, fixed,
                                                          alloc_demand, size.mobile_total);

  const std::int64_t baseline =
      hindsight_optimum(topo, demand, mobile, fixed, cfg.test_start_hour, cfg.hours);
  PolicyConfig pc;
  pc.h = std::min(cfg.h, cfg.hours);
  pc.forecaster = fs_spec;
  const SimulationTrace trace =
      run_simulation(topo, demand, mobile, fixed, pc, cfg.test_start_hour, cfg.hours);
  const Metrics metrics = compute_metrics(trace, baseline);

  const fs::path trace_path = out_dir / "trace.csv";
  const fs::path metrics_path = out_dir / "metrics.json";
  {
    auto out = open_output(trace_path);
    save_trace_csv(trace, out);
  }
  {
    auto out = open_output(metrics_path);
    out << make_metrics_json(metrics).dump(2) << "\n";
  }

  std::cout << "scenario: " << topo.station_count() << " stations, hours "
            << cfg.test_start_hour << ".." << cfg.test_start_hour + cfg.hours - 1
            << ", forecaster " << cfg.forecaster << ", h=" << pc.h << "\n";
  std::cout << "fleet: " << size.total << " batteries (" << size.fixed_total
            << " fixed, " << size.mobile_total << " mobile)\n";
  std::cout << "total demand " << metrics.total_demand << ", lost " << metrics.total_lost
            << ", hindsight " << metrics.baseline_lost << "\n";
  std::cout << "lost_ratio " << swapsched::detail::format_fixed(metrics.lost_ratio)
            << ", relative_to_oracle ";
  if (std::isinf(metrics.relative_to_baseline))
    std::cout << "inf";
  else
    std::cout << swapsched::detail::format_fixed(metrics.relative_to_baseline);
  std::cout << "\n";
  std::cout << "wrote " << trace_path.string() << " and " << metrics_path.string() << "\n";
  return 0;
}

std::vector<double> default_axis_values(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kInventory: return {0.6, 0.75, 0.9};
    case SweepAxis::kHorizon: return {1, 2, 3, 4, 5, 6};
    case SweepAxis::kMobileRatio: return {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    case SweepAxis::kShift: return {0, 4, 8};
  }
  return {};
}

int cmd_sweep(const CommonArgs& args, const std::string& axis_name,
              const std::vector<double>& values, int repetitions) {
  const RunConfig cfg = load_run_config(args.config_path, args.overrides);
  const fs::path out_dir = resolve_output_dir(args, cfg);

  SweepSpec spec;
  try {
    spec.axis = parse_sweep_axis(axis_name);
    spec.values = values.empty() ? default_axis_values(spec.axis) : values;
    spec.repetitions = repetitions > 0 ? repetitions : cfg.repetitions;
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  const ScenarioConfig base = to_scenario(cfg);
  const std::vector<ResultRow> rows =
      run_sweep(spec, base, default_policies(), cfg.threads);

  const fs::path results_path = out_dir / "results.csv";
  const fs::path plot_path = out_dir / "plot.json";
  {
    auto out = open_output(results_path);
    write_results_csv(rows, out);
  }
  {
    auto out = open_output(plot_path);
    write_plot_json(spec, rows, out);
  }

  std::cout << "sweep axis=" << sweep_axis_name(spec.axis) << " values=" << spec.values.size()
            << " policies=" << default_policies().size()
            << " repetitions=" << spec.repetitions << " cells=" << rows.size() << "\n";
  std::cout << "wrote " << results_path.string() << " and " << plot_path.string() << "\n";
  return 0;
}

int cmd_inspect(const std::string& trace_path) {
  std::vector<TraceRow> rows;
  try {
    rows = load_trace_csv(trace_path);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());  // unreadable or malformed input file
  }
  check_trace(rows);

  int stations = 0;
  while (stations < static_cast<int>(rows.size()) && rows[stations].hour == rows[0].hour)
    ++stations;
  const int hours = static_cast<int>(rows.size()) / stations;
  long long demand = 0, lost = 0, moves = 0, fleet = 0;
  for (const auto& r : rows) {
    demand += r.actual;
    lost += r.lost;
    moves += r.moved_out;
  }
  for (int i = 0; i < stations; ++i) fleet += rows[i].positions_before;

  std::cout << "trace: " << hours << " hours (" << rows[0].hour << ".."
            << rows.back().hour << "), " << stations << " stations, mobile fleet "
            << fleet << "\n";
  std::cout << "total demand " << demand << ", lost " << lost << ", relocations "
            << moves << "\n";
  std::cout << "all invariants hold\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mobile battery-swap fleet scheduling experiments"};
  app.require_subcommand(1);

  CommonArgs gen_args, run_args, sweep_args;
  CLI::App* gen = app.add_subcommand("generate", "write synthetic topology + traffic");
  add_common(gen, gen_args);

  CLI::App* run = app.add_subcommand("run", "run one scenario end-to-end");
  add_common(run, run_args);

  CLI::App* sweep = app.add_subcommand("sweep", "run an experiment sweep");
  add_common(sweep, sweep_args);
  std::string axis = "horizon";
  std::vector<double> values;
  int repetitions = 0;
  sweep->add_option("-a,--axis", axis, "inventory | horizon | mobile_ratio | shift");
  sweep->add_option("-v,--values", values, "axis values (default depends on axis)")
      ->delimiter(',');
  sweep->add_option("-r,--repetitions", repetitions, "seeds per cell (default from config)");

  CLI::App* inspect = app.add_subcommand("inspect-trace", "validate and summarize a trace");
  std::string trace_path;
  inspect->add_option("trace", trace_path, "trace CSV file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_generate(gen_args);
    if (run->parsed()) return cmd_run(run_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args, axis, values, repetitions);
    if (inspect->parsed()) return cmd_inspect(trace_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
