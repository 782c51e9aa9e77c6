#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "swapsched/allocation.hpp"
#include "swapsched/detail/rng.hpp"
#include "swapsched/detail/text.hpp"
#include "swapsched/forecast.hpp"
#include "swapsched/simulation.hpp"
#include "swapsched/topology.hpp"
#include "swapsched/traffic.hpp"

namespace swapsched {

/// The policy roster compared in every sweep: the hindsight (oracle
/// schedule) bound and three rolling-horizon variants differing only in
/// their forecaster.
enum class Policy { kHindsight, kOracleRolling, kNoisyOracleRolling, kSeasonalNaiveRolling };

inline const char* policy_name(Policy p) {
  switch (p) {
    case Policy::kHindsight: return "hindsight";
    case Policy::kOracleRolling: return "oracle";
    case Policy::kNoisyOracleRolling: return "noisy-oracle";
    case Policy::kSeasonalNaiveRolling: return "seasonal-naive";
  }
  return "?";
}

inline std::vector<Policy> default_policies() {
  return {Policy::kHindsight, Policy::kOracleRolling, Policy::kNoisyOracleRolling,
          Policy::kSeasonalNaiveRolling};
}

/// Everything needed to materialize one experiment cell. The seed is a base
/// value: each repetition derives its own traffic, shift and forecast
/// streams from (seed, repetition), so repetition k sees identical traffic
/// across axis values (common random numbers).
struct ScenarioConfig {
  Topology topo;
  SeasonalitySpec traffic;
  int days = 4;
  int test_start_hour = 25;  // first simulated hour; earlier hours are history
  int hours = 72;
  FleetConfig fleet;
  int h = 6;                   // rolling-horizon lookahead
  int allocation_horizon = 6;  // window for the initial-placement model
  double forecast_noise = 0.15;
  double noise_step_growth = 0.0;
  double shift_fraction = 0.3;  // share of stations whose demand is shifted
  int shift_hours = 0;
  std::uint64_t seed = 1;

  void validate() const {
    if (topo.station_count() < 1)
      throw std::invalid_argument("scenario needs at least one station");
    traffic.validate();
    fleet.validate();
    if (days < 1) throw std::invalid_argument("days must be >= 1");
    if (hours < 1) throw std::invalid_argument("hours must be >= 1");
    if (test_start_hour < 1)
      throw std::invalid_argument("test_start_hour must be >= 1");
    if (test_start_hour + hours - 1 > 24 * days)
      throw std::invalid_argument("test window exceeds generated days");
    if (h < 1 || h > 24) throw std::invalid_argument("h must be in [1,24]");
    if (allocation_horizon < 1 || allocation_horizon > 24)
      throw std::invalid_argument("allocation_horizon must be in [1,24]");
    if (!(forecast_noise >= 0))
      throw std::invalid_argument("forecast_noise must be >= 0");
    if (!(noise_step_growth >= 0))
      throw std::invalid_argument("noise_step_growth must be >= 0");
    if (!(shift_fraction >= 0 && shift_fraction <= 1))
      throw std::invalid_argument("shift_fraction must be in [0,1]");
    if (shift_hours < 0 || shift_hours >= 24)
      throw std::invalid_argument("shift_hours must be in [0,24)");
  }
};

inline ScenarioConfig default_scenario() {
  ScenarioConfig scn;
  scn.topo = make_ring(12);
  return scn;
}

inline ForecasterSpec forecaster_for(Policy policy, const ScenarioConfig& scn,
                                     std::uint64_t forecast_seed) {
  ForecasterSpec fs;
  switch (policy) {
    case Policy::kHindsight:
    case Policy::kOracleRolling:
      fs.kind = ForecasterKind::kOracle;
      break;
    case Policy::kNoisyOracleRolling:
      fs.kind = ForecasterKind::kNoisyOracle;
      fs.noise = scn.forecast_noise;
      fs.noise_step_growth = scn.noise_step_growth;
      fs.seed = forecast_seed;
      break;
    case Policy::kSeasonalNaiveRolling:
      fs.kind = ForecasterKind::kSeasonalNaive;
      break;
  }
  return fs;
}

namespace detail {

inline std::vector<int> pick_shifted_stations(int stations, double fraction,
                                              std::uint64_t seed) {
  const int k = std::min(stations, round_half_up(fraction * stations));
  std::vector<int> ids(stations);
  for (int i = 0; i < stations; ++i) ids[i] = i;
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(hash3(seed, 0x5e1, i) % (stations - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(k);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace detail

struct CellResult {
  std::int64_t total_demand = 0;
  std::int64_t total_lost = 0;
  std::int64_t baseline_lost = 0;  // hindsight optimum for the same fleet
  double lost_ratio = 0.0;
  double relative_to_oracle = 1.0;
};

/// Runs one (scenario, policy, repetition) cell end to end: synthesize
/// demand, size and place the fleet using the policy's own forecaster, then
/// simulate (or, for the hindsight policy, solve the full-horizon schedule
/// directly). The hindsight optimum for the same fleet is always computed
/// as the relative-to-oracle baseline, so relative >= 1 by construction.
inline CellResult run_cell(const ScenarioConfig& scn, Policy policy, int repetition) {
  scn.validate();
  if (repetition < 0) throw std::invalid_argument("repetition must be >= 0");

  const std::uint64_t rep_seed = detail::hash3(scn.seed, 0xa11, repetition);
  const std::uint64_t traffic_seed = detail::hash2(rep_seed, 1);
  const std::uint64_t shift_seed = detail::hash2(rep_seed, 2);
  const std::uint64_t forecast_seed = detail::hash2(rep_seed, 3);

  TrafficSeries demand = generate_synthetic(scn.topo, scn.days, traffic_seed, scn.traffic);
  if (scn.shift_hours > 0 && scn.shift_fraction > 0) {
    ShiftSpec shift;
    shift.stations = detail::pick_shifted_stations(scn.topo.station_count(),
                                                   scn.shift_fraction, shift_seed);
    shift.shift_hours = scn.shift_hours;
    demand = apply_shift(demand, shift);
  }

  const std::vector<double> avg =
      mean_per_series(demand, scn.test_start_hour, scn.hours);
  const FleetSize size = scn.fleet.derive(avg);
  const std::vector<int> fixed = allocate_fixed(avg, size.fixed_total);

  const ForecasterSpec fs = forecaster_for(policy, scn, forecast_seed);
  const int h_alloc = std::min(scn.allocation_horizon, scn.hours);
  const ForecastWindow window =
      predict(fs, demand.prefix(scn.test_start_hour - 1), &demand, h_alloc);
  std::vector<int> alloc_demand(static_cast<std::size_t>(h_alloc) *
                                scn.topo.station_count());
  for (int t = 1; t <= h_alloc; ++t)
    for (int i = 0; i < scn.topo.station_count(); ++i)
      alloc_demand[static_cast<std::size_t>(t - 1) * scn.topo.station_count() + i] =
          round_half_up(window.at(t, i));
  const std::vector<int> mobile = allocate_mobile_initial(
      scn.topo, h_alloc, fixed, alloc_demand, size.mobile_total);

  CellResult cell;
  cell.baseline_lost = hindsight_optimum(scn.topo, demand, mobile, fixed,
                                         scn.test_start_hour, scn.hours);
  if (policy == Policy::kHindsight) {
    cell.total_lost = cell.baseline_lost;
    for (int t = scn.test_start_hour; t < scn.test_start_hour + scn.hours; ++t)
      for (int i = 0; i < scn.topo.station_count(); ++i)
        cell.total_demand += demand.at(t, i);
    cell.lost_ratio = cell.total_demand > 0
                          ? static_cast<double>(cell.total_lost) / cell.total_demand
                          : 0.0;
    cell.relative_to_oracle = 1.0;
  } else {
    PolicyConfig pc;
    pc.h = std::min(scn.h, scn.hours);
    pc.forecaster = fs;
    const SimulationTrace trace = run_simulation(scn.topo, demand, mobile, fixed, pc,
                                                 scn.test_start_hour, scn.hours);
    const Metrics m = compute_metrics(trace, cell.baseline_lost);
    cell.total_demand = m.total_demand;
    cell.total_lost = m.total_lost;
    cell.lost_ratio = m.lost_ratio;
    cell.relative_to_oracle = m.relative_to_baseline;
  }
  return cell;
}

enum class SweepAxis { kInventory, kHorizon, kMobileRatio, kShift };

inline const char* sweep_axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::kInventory: return "inventory";
    case SweepAxis::kHorizon: return "horizon";
    case SweepAxis::kMobileRatio: return "mobile_ratio";
    case SweepAxis::kShift: return "shift";
  }
  return "?";
}

inline SweepAxis parse_sweep_axis(const std::string& name) {
  for (SweepAxis a : {SweepAxis::kInventory, SweepAxis::kHorizon,
                      SweepAxis::kMobileRatio, SweepAxis::kShift})
    if (name == sweep_axis_name(a)) return a;
  throw std::invalid_argument("unknown sweep axis '" + name + "'");
}

struct SweepSpec {
  SweepAxis axis = SweepAxis::kHorizon;
  std::vector<double> values;
  int repetitions = 20;

  void validate() const {
    if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
    if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
    for (double v : values) {
      switch (axis) {
        case SweepAxis::kInventory:
          if (!(v > 0 && v <= 1.5))
            throw std::invalid_argument("inventory values must be in (0,1.5]");
          break;
        case SweepAxis::kHorizon:
          if (v != std::floor(v) || v < 1 || v > 6)
            throw std::invalid_argument("horizon values must be integers in [1,6]");
          break;
        case SweepAxis::kMobileRatio:
          if (!(v >= 0 && v <= 1))
            throw std::invalid_argument("mobile_ratio values must be in [0,1]");
          break;
        case SweepAxis::kShift:
          if (v != std::floor(v) || v < 0 || v > 23)
            throw std::invalid_argument("shift values must be integers in [0,23]");
          break;
      }
    }
  }
};

inline ScenarioConfig apply_axis(const ScenarioConfig& base, SweepAxis axis, double value) {
  ScenarioConfig scn = base;
  switch (axis) {
    case SweepAxis::kInventory:
      scn.fleet.inventory_level = value;
      break;
    case SweepAxis::kHorizon:
      scn.h = static_cast<int>(value);
      break;
    case SweepAxis::kMobileRatio:
      scn.fleet.mobile_ratio = value;
      break;
    case SweepAxis::kShift:
      scn.shift_hours = static_cast<int>(value);
      break;
  }
  return scn;
}

struct ResultRow {
  double axis_value = 0;
  Policy policy = Policy::kHindsight;
  int seed = 0;
  CellResult cell;
};

/// Runs every (value, policy, repetition) cell. Cells are independent and
/// executed by a small worker pool; results land in preassigned slots, so
/// the output order (value-major, then policy, then seed) never depends on
/// thread timing. `threads` <= 0 picks the hardware default.
inline std::vector<ResultRow> run_sweep(const SweepSpec& spec, const ScenarioConfig& base,
                                        const std::vector<Policy>& policies = default_policies(),
                                        int threads = 0) {
  spec.validate();
  if (policies.empty()) throw std::invalid_argument("sweep needs at least one policy");

  struct Cell {
    double value;
    Policy policy;
    int seed;
  };
  std::vector<Cell> cells;
  for (double v : spec.values)
    for (Policy p : policies)
      for (int seed = 0; seed < spec.repetitions; ++seed) cells.push_back({v, p, seed});

  // Validate every derived scenario up front so a bad axis value fails
  // before any work is spawned.
  for (double v : spec.values) apply_axis(base, spec.axis, v).validate();

  std::vector<ResultRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;

  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min<int>(workers, static_cast<int>(cells.size()));

  const auto work = [&]() {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= cells.size() || failed.load()) return;
      const Cell& c = cells[k];
      try {
        const ScenarioConfig scn = apply_axis(base, spec.axis, c.value);
        rows[k] = {c.value, c.policy, c.seed, run_cell(scn, c.policy, c.seed)};
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) error_message = e.what();
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) throw std::runtime_error(error_message);
  return rows;
}

inline void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << "axis_value,policy,seed,total_demand,total_lost,lost_ratio,relative_to_oracle\n";
  for (const auto& r : rows) {
    out << detail::format_double(r.axis_value) << ',' << policy_name(r.policy) << ','
        << r.seed << ',' << r.cell.total_demand << ',' << r.cell.total_lost << ',';
    out << detail::format_fixed(r.cell.lost_ratio) << ',';
    if (std::isinf(r.cell.relative_to_oracle))
      out << "inf";
    else
      out << detail::format_fixed(r.cell.relative_to_oracle);
    out << "\n";
  }
}

}  // namespace swapsched
