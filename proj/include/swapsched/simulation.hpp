#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "swapsched/detail/text.hpp"
#include "swapsched/policy.hpp"
#include "swapsched/scheduling.hpp"
#include "swapsched/traffic.hpp"

namespace swapsched {

struct HourRecord {
  int hour = 0;  // absolute hour in the realized series
  std::vector<int> positions_before, stayed, moved_in, moved_out;
  std::vector<int> actual, served, lost, positions_after;
};

struct SimulationTrace {
  int start_hour = 0;
  int hours = 0;
  int stations = 0;
  std::vector<HourRecord> records;
  std::int64_t total_demand = 0;
  std::int64_t total_lost = 0;
  double lost_ratio = 0.0;  // total_lost / total_demand, 0 when no demand
};

/// Replays the rolling-horizon policy against realized demand. Each hour
/// the policy sees only the demand history up to the previous hour (plus
/// whatever its forecaster is entitled to), commits the first step of its
/// plan, and the hour then resolves: batteries that stayed serve together
/// with the fixed stock, batteries in transit serve nothing and arrive for
/// the next hour. Unserved requests are lost, not carried over.
inline SimulationTrace run_simulation(const Topology& topo, const TrafficSeries& actual,
                                      const std::vector<int>& mobile_initial,
                                      const std::vector<int>& fixed,
                                      const PolicyConfig& cfg, int start_hour,
                                      int hours) {
  cfg.validate();
  const int s = topo.station_count();
  if (actual.kind != SeriesKind::kStationDemand)
    throw std::invalid_argument("simulation needs a station-demand series");
  if (actual.series_count != s)
    throw std::invalid_argument("demand series does not match topology");
  if (static_cast<int>(mobile_initial.size()) != s ||
      static_cast<int>(fixed.size()) != s)
    throw std::invalid_argument("battery vectors do not match station count");
  if (hours < 1) throw std::invalid_argument("simulation must cover >= 1 hour");
  if (start_hour < 1 || start_hour + hours - 1 > actual.horizon)
    throw std::invalid_argument("simulation window [" + std::to_string(start_hour) +
                                "," + std::to_string(start_hour + hours - 1) +
                                "] exceeds realized demand horizon " +
                                std::to_string(actual.horizon));
  for (int v : mobile_initial)
    if (v < 0) throw std::invalid_argument("mobile_initial must be non-negative");
  for (int v : fixed)
    if (v < 0) throw std::invalid_argument("fixed must be non-negative");

  SimulationTrace trace;
  trace.start_hour = start_hour;
  trace.hours = hours;
  trace.stations = s;

  TrafficSeries history = actual.prefix(start_hour - 1);
  std::vector<int> positions = mobile_initial;

  for (int step = 0; step < hours; ++step) {
    const int hour = start_hour + step;
    const int h_eff = std::min(cfg.h, hours - step);
    PolicyConfig step_cfg = cfg;
    step_cfg.h = h_eff;
    const ForecastWindow window = predict(cfg.forecaster, history, &actual, h_eff);
    const FirstStepMoves moves = plan_step(positions, fixed, window, topo, step_cfg);

    HourRecord rec;
    rec.hour = hour;
    rec.positions_before = positions;
    rec.stayed.resize(s);
    rec.moved_in.resize(s);
    rec.moved_out.resize(s);
    rec.actual.resize(s);
    rec.served.resize(s);
    rec.lost.resize(s);
    rec.positions_after.resize(s);

    std::vector<int> history_row(s);
    for (int i = 0; i < s; ++i) {
      rec.stayed[i] = moves.stayed(i);
      rec.moved_out[i] = moves.outflow(i) - moves.stayed(i);
      rec.moved_in[i] = moves.inflow(i) - moves.stayed(i);
      rec.actual[i] = actual.at(hour, i);
      rec.served[i] = std::min(rec.actual[i], fixed[i] + rec.stayed[i]);
      rec.lost[i] = rec.actual[i] - rec.served[i];
      rec.positions_after[i] = moves.inflow(i);
      trace.total_demand += rec.actual[i];
      trace.total_lost += rec.lost[i];
      history_row[i] = rec.actual[i];
    }
    positions = rec.positions_after;
    history.append_hour(history_row);
    trace.records.push_back(std::move(rec));
  }
  trace.lost_ratio = trace.total_demand > 0
                         ? static_cast<double>(trace.total_lost) / trace.total_demand
                         : 0.0;
  return trace;
}

/// Lost demand of the best schedule computable with the realized demand
/// known in advance. Lower bound for any causal policy on the same window.
inline std::int64_t hindsight_optimum(const Topology& topo, const TrafficSeries& actual,
                                      const std::vector<int>& mobile_initial,
                                      const std::vector<int>& fixed, int start_hour,
                                      int hours) {
  if (actual.kind != SeriesKind::kStationDemand)
    throw std::invalid_argument("hindsight needs a station-demand series");
  if (hours < 1) throw std::invalid_argument("window must cover >= 1 hour");
  if (start_hour < 1 || start_hour + hours - 1 > actual.horizon)
    throw std::invalid_argument("hindsight window exceeds demand horizon");
  SchedulingInstance inst;
  inst.topo = topo;
  inst.horizon = hours;
  inst.mobile_initial = mobile_initial;
  inst.fixed_batteries = fixed;
  inst.demand.resize(static_cast<std::size_t>(hours) * topo.station_count());
  for (int t = 1; t <= hours; ++t)
    for (int i = 0; i < topo.station_count(); ++i)
      inst.demand_at(t, i) = actual.at(start_hour + t - 1, i);
  return solve_schedule(inst).objective;
}

struct Metrics {
  std::int64_t total_demand = 0;
  std::int64_t total_lost = 0;
  std::int64_t baseline_lost = 0;
  double lost_ratio = 0.0;
  // Realized lost relative to the baseline: 1 when both are zero,
  // +infinity when the baseline is zero but losses occurred.
  double relative_to_baseline = 1.0;
};

inline Metrics compute_metrics(const SimulationTrace& trace, std::int64_t baseline_lost) {
  if (baseline_lost < 0) throw std::invalid_argument("baseline_lost must be >= 0");
  Metrics m;
  m.total_demand = trace.total_demand;
  m.total_lost = trace.total_lost;
  m.baseline_lost = baseline_lost;
  m.lost_ratio = trace.lost_ratio;
  if (baseline_lost > 0)
    m.relative_to_baseline = static_cast<double>(trace.total_lost) / baseline_lost;
  else
    m.relative_to_baseline =
        trace.total_lost == 0 ? 1.0 : std::numeric_limits<double>::infinity();
  return m;
}

inline void save_trace_csv(const SimulationTrace& trace, std::ostream& out) {
  out << "hour,station,positions_before,stayed,moved_in,moved_out,actual,served,lost,"
         "positions_after\n";
  for (const auto& rec : trace.records)
    for (int i = 0; i < trace.stations; ++i)
      out << rec.hour << ',' << i << ',' << rec.positions_before[i] << ','
          << rec.stayed[i] << ',' << rec.moved_in[i] << ',' << rec.moved_out[i] << ','
          << rec.actual[i] << ',' << rec.served[i] << ',' << rec.lost[i] << ','
          << rec.positions_after[i] << "\n";
}

inline void save_trace_csv(const SimulationTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file '" + path + "'");
  save_trace_csv(trace, out);
}

struct TraceRow {
  int hour, station;
  int positions_before, stayed, moved_in, moved_out;
  int actual, served, lost, positions_after;
};

inline std::vector<TraceRow> load_trace_csv(std::istream& in, const std::string& source) {
  const auto fail = [&](int line, const std::string& msg) -> void {
    throw std::runtime_error(source + ":" + std::to_string(line) + ": " + msg);
  };
  std::vector<TraceRow> rows;
  std::string raw;
  int line_no = 0;
  bool saw_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!saw_header) {
      if (line.rfind("hour,station,", 0) != 0)
        fail(line_no, "expected trace header starting with 'hour,station,'");
      saw_header = true;
      continue;
    }
    const auto fields = detail::split(line, ',');
    if (fields.size() != 10) fail(line_no, "expected 10 columns");
    TraceRow r;
    int k = 0;
    const auto next = [&](const char* what) {
      return static_cast<int>(detail::parse_int(fields[k++], what));
    };
    r.hour = next("hour");
    r.station = next("station");
    r.positions_before = next("positions_before");
    r.stayed = next("stayed");
    r.moved_in = next("moved_in");
    r.moved_out = next("moved_out");
    r.actual = next("actual");
    r.served = next("served");
    r.lost = next("lost");
    r.positions_after = next("positions_after");
    rows.push_back(r);
  }
  if (!saw_header) throw std::runtime_error(source + ": missing trace header");
  return rows;
}

inline std::vector<TraceRow> load_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file '" + path + "'");
  return load_trace_csv(in, path);
}

/// Re-checks the accounting identities of a recorded trace. Throws
/// std::runtime_error naming the first violated invariant and where.
inline void check_trace(const std::vector<TraceRow>& rows) {
  if (rows.empty()) throw std::runtime_error("trace is empty");
  const auto fail = [](const TraceRow& r, const std::string& msg) -> void {
    throw std::runtime_error("hour " + std::to_string(r.hour) + " station " +
                             std::to_string(r.station) + ": " + msg);
  };

  // Rows must come in station-major blocks per hour, hours contiguous.
  int stations = 0;
  while (stations < static_cast<int>(rows.size()) &&
         rows[stations].hour == rows[0].hour)
    ++stations;
  if (rows.size() % stations != 0)
    throw std::runtime_error("trace rows do not form complete hour blocks");
  const int hours = static_cast<int>(rows.size()) / stations;

  std::vector<int> prev_after;
  long long fleet = 0;
  for (int b = 0; b < hours; ++b) {
    const TraceRow* block = &rows[static_cast<std::size_t>(b) * stations];
    long long in_sum = 0, out_sum = 0, fleet_now = 0;
    for (int i = 0; i < stations; ++i) {
      const TraceRow& r = block[i];
      if (r.station != i) fail(r, "unexpected station order");
      if (r.hour != block[0].hour) fail(r, "hour block is ragged");
      if (b > 0 && r.hour != rows[(b - 1) * stations].hour + 1)
        fail(r, "hours are not contiguous");
      for (int v : {r.positions_before, r.stayed, r.moved_in, r.moved_out, r.actual,
                    r.served, r.lost, r.positions_after})
        if (v < 0) fail(r, "negative count");
      if (r.stayed + r.moved_out != r.positions_before)
        fail(r, "stayed + moved_out != positions_before");
      if (r.positions_after != r.stayed + r.moved_in)
        fail(r, "positions_after != stayed + moved_in");
      if (r.served > r.actual) fail(r, "served exceeds actual");
      if (r.lost != r.actual - r.served) fail(r, "lost != actual - served");
      if (b > 0 && r.positions_before != prev_after[i])
        fail(r, "positions_before does not match previous hour");
      in_sum += r.moved_in;
      out_sum += r.moved_out;
      fleet_now += r.positions_after;
    }
    if (in_sum != out_sum)
      fail(block[0], "moved_in total != moved_out total");
    if (b == 0)
      fleet = fleet_now;
    else if (fleet_now != fleet)
      fail(block[0], "mobile fleet size changed");
    prev_after.assign(stations, 0);
    for (int i = 0; i < stations; ++i) prev_after[i] = block[i].positions_after;
  }
}

}  // namespace swapsched
