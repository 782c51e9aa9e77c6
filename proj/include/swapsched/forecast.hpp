#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "swapsched/detail/rng.hpp"
#include "swapsched/detail/text.hpp"
#include "swapsched/traffic.hpp"

namespace swapsched {

enum class ForecasterKind {
  kOracle,             // realized future demand, error-free
  kNoisyOracle,        // realized future with multiplicative gaussian error
  kSeasonalNaive,      // value observed one period (24h) earlier
  kHistoricalAverage,  // mean over prior observations of the same hour of day
  kExternal            // precomputed forecasts loaded from a file
};

inline const char* forecaster_kind_name(ForecasterKind k) {
  switch (k) {
    case ForecasterKind::kOracle: return "oracle";
    case ForecasterKind::kNoisyOracle: return "noisy-oracle";
    case ForecasterKind::kSeasonalNaive: return "seasonal-naive";
    case ForecasterKind::kHistoricalAverage: return "historical-average";
    case ForecasterKind::kExternal: return "external";
  }
  return "?";
}

inline ForecasterKind parse_forecaster_kind(const std::string& name) {
  for (ForecasterKind k : {ForecasterKind::kOracle, ForecasterKind::kNoisyOracle,
                           ForecasterKind::kSeasonalNaive,
                           ForecasterKind::kHistoricalAverage, ForecasterKind::kExternal})
    if (name == forecaster_kind_name(k)) return k;
  throw std::invalid_argument("unknown forecaster '" + name + "'");
}

struct ForecasterSpec {
  ForecasterKind kind = ForecasterKind::kSeasonalNaive;
  double noise = 0.15;             // noisy-oracle: relative stddev at step 1
  double noise_step_growth = 0.0;  // relative stddev grows by this per extra step
  std::uint64_t seed = 1;          // noisy-oracle error stream
  int period = 24;                 // seasonality period in hours
  int average_window = 0;          // historical-average: most recent k periods, 0 = all
  std::string path;                // external: forecast file

  void validate() const {
    if (!(noise >= 0)) throw std::invalid_argument("forecast noise must be >= 0");
    if (!(noise_step_growth >= 0))
      throw std::invalid_argument("noise_step_growth must be >= 0");
    if (period < 1) throw std::invalid_argument("period must be >= 1");
    if (average_window < 0)
      throw std::invalid_argument("average_window must be >= 0");
    if (kind == ForecasterKind::kExternal && path.empty())
      throw std::invalid_argument("external forecaster needs a file path");
  }
};

/// Demand predictions for hours origin+1 .. origin+steps, one value per
/// station per step. Values are fractional; integerization happens at the
/// point of use.
struct ForecastWindow {
  int origin = 0;
  int steps = 0;
  int stations = 0;
  std::vector<double> values;  // steps x stations, step-major

  double at(int step, int station) const {
    check_index(step, station);
    return values[static_cast<std::size_t>(step - 1) * stations + station];
  }

  double& at(int step, int station) {
    check_index(step, station);
    return values[static_cast<std::size_t>(step - 1) * stations + station];
  }

  static ForecastWindow zeros(int origin, int steps, int stations) {
    ForecastWindow w;
    w.origin = origin;
    w.steps = steps;
    w.stations = stations;
    w.values.assign(static_cast<std::size_t>(steps) * stations, 0.0);
    return w;
  }

 private:
  void check_index(int step, int station) const {
    if (step < 1 || step > steps)
      throw std::out_of_range("forecast step " + std::to_string(step) + " out of range");
    if (station < 0 || station >= stations)
      throw std::out_of_range("station index " + std::to_string(station) + " out of range");
  }
};

/// Forecast file format, one row per (origin, step, station):
///   t,step,station,value
/// where t is the forecast origin (last observed hour).
inline void save_forecast_csv(const std::vector<ForecastWindow>& windows,
                              std::ostream& out) {
  out << "t,step,station,value\n";
  for (const auto& w : windows)
    for (int s = 1; s <= w.steps; ++s)
      for (int i = 0; i < w.stations; ++i)
        out << w.origin << ',' << s << ',' << i << ','
            << detail::format_exact(w.at(s, i)) << "\n";
}

inline void save_forecast_csv(const std::vector<ForecastWindow>& windows,
                              const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write forecast file '" + path + "'");
  save_forecast_csv(windows, out);
}

/// Loads the window at the given origin from a forecast file. Every
/// (step, station) cell in the window must be present; a missing cell is an
/// error naming the (t, step) it expected.
inline ForecastWindow load_external_forecast(const std::string& path, int origin,
                                             int steps, int stations) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open forecast file '" + path + "'");

  std::map<std::pair<int, int>, double> cells;  // (step, station) -> value
  std::string raw;
  int line_no = 0;
  bool saw_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!saw_header) {
      if (line != "t,step,station,value")
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": expected header 't,step,station,value'");
      saw_header = true;
      continue;
    }
    const auto fields = detail::split(line, ',');
    if (fields.size() != 4)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 4 columns");
    const long long t = detail::parse_int(fields[0], "t");
    const long long step = detail::parse_int(fields[1], "step");
    const long long station = detail::parse_int(fields[2], "station");
    const double value = detail::parse_double(fields[3], "value");
    if (value < 0)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": negative forecast value");
    if (t != origin) continue;
    if (step < 1 || station < 0)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": step must be >= 1 and station >= 0");
    cells[{static_cast<int>(step), static_cast<int>(station)}] = value;
  }
  if (!saw_header) throw std::runtime_error(path + ": missing header row");

  ForecastWindow w = ForecastWindow::zeros(origin, steps, stations);
  for (int s = 1; s <= steps; ++s)
    for (int i = 0; i < stations; ++i) {
      const auto it = cells.find({s, i});
      if (it == cells.end())
        throw std::runtime_error(path + ": missing forecast row for t=" +
                                 std::to_string(origin) + ", step=" + std::to_string(s) +
                                 " (station " + std::to_string(i) + ")");
      w.at(s, i) = it->second;
    }
  return w;
}

namespace detail {

inline double persistence_fallback(const TrafficSeries& history, int station) {
  return history.horizon >= 1 ? history.at(history.horizon, station) : 0.0;
}

}  // namespace detail

/// Predicts demand for the h hours following `history`. The oracle kinds
/// additionally need the realized series (`actual`), which must extend at
/// least h hours past the history. Naive kinds with too little history fall
/// back to persistence of the last observation, or zero with no history at
/// all. Output is always non-negative and deterministic.
inline ForecastWindow predict(const ForecasterSpec& spec, const TrafficSeries& history,
                              const TrafficSeries* actual, int h) {
  spec.validate();
  if (h < 1) throw std::invalid_argument("forecast length h must be >= 1");
  if (history.kind != SeriesKind::kStationDemand)
    throw std::invalid_argument("forecasters operate on station-demand series");
  const int origin = history.horizon;
  const int stations = history.series_count;
  ForecastWindow w = ForecastWindow::zeros(origin, h, stations);

  switch (spec.kind) {
    case ForecasterKind::kOracle:
    case ForecasterKind::kNoisyOracle: {
      if (actual == nullptr)
        throw std::runtime_error("oracle forecaster needs the realized series");
      if (actual->series_count != stations)
        throw std::runtime_error("realized series station count mismatch");
      if (actual->horizon < origin + h)
        throw std::runtime_error("oracle forecaster needs realized demand through hour " +
                                 std::to_string(origin + h) + ", have " +
                                 std::to_string(actual->horizon));
      for (int s = 1; s <= h; ++s)
        for (int i = 0; i < stations; ++i) {
          double v = actual->at(origin + s, i);
          if (spec.kind == ForecasterKind::kNoisyOracle) {
            const double sigma = spec.noise * (1.0 + spec.noise_step_growth * (s - 1));
            const double eps =
                sigma * detail::to_normal(detail::hash4(spec.seed, origin, i, s));
            v = std::max(0.0, v * (1.0 + eps));
          }
          w.at(s, i) = v;
        }
      break;
    }
    case ForecasterKind::kSeasonalNaive: {
      for (int s = 1; s <= h; ++s)
        for (int i = 0; i < stations; ++i) {
          const int src = origin + s - spec.period;
          w.at(s, i) = (src >= 1 && src <= origin) ? history.at(src, i)
                                                   : detail::persistence_fallback(history, i);
        }
      break;
    }
    case ForecasterKind::kHistoricalAverage: {
      for (int s = 1; s <= h; ++s)
        for (int i = 0; i < stations; ++i) {
          const int target = origin + s;
          // Prior observations at the same phase of the period, newest first.
          int first = target - spec.period;
          while (first > origin) first -= spec.period;
          double sum = 0;
          int count = 0;
          for (int k = first; k >= 1; k -= spec.period) {
            sum += history.at(k, i);
            ++count;
            if (spec.average_window > 0 && count == spec.average_window) break;
          }
          w.at(s, i) = count > 0 ? sum / count : detail::persistence_fallback(history, i);
        }
      break;
    }
    case ForecasterKind::kExternal: {
      w = load_external_forecast(spec.path, origin, h, stations);
      break;
    }
  }
  return w;
}

}  // namespace swapsched
