#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "swapsched/detail/rng.hpp"
#include "swapsched/detail/text.hpp"
#include "swapsched/topology.hpp"

namespace swapsched {

/// Rounding rule used everywhere a fractional quantity becomes a count:
/// round half away from zero for non-negative inputs.
inline int round_half_up(double x) {
  return static_cast<int>(std::floor(x + 0.5));
}

enum class SeriesKind { kEdgeTraffic, kStationDemand };

inline const char* series_kind_name(SeriesKind k) {
  return k == SeriesKind::kEdgeTraffic ? "edge-traffic" : "station-demand";
}

/// Hour-indexed panel of non-negative integer counts, one column per
/// station (swap demand) or per edge (road traffic). Hours are 1-based.
struct TrafficSeries {
  SeriesKind kind = SeriesKind::kStationDemand;
  int horizon = 0;
  int series_count = 0;
  std::vector<int> values;  // horizon x series_count, hour-major

  int at(int hour, int series) const {
    check_index(hour, series);
    return values[static_cast<std::size_t>(hour - 1) * series_count + series];
  }

  int& at(int hour, int series) {
    check_index(hour, series);
    return values[static_cast<std::size_t>(hour - 1) * series_count + series];
  }

  static TrafficSeries zeros(SeriesKind kind, int horizon, int series_count) {
    if (horizon < 0 || series_count < 0)
      throw std::invalid_argument("series dimensions must be non-negative");
    TrafficSeries s;
    s.kind = kind;
    s.horizon = horizon;
    s.series_count = series_count;
    s.values.assign(static_cast<std::size_t>(horizon) * series_count, 0);
    return s;
  }

  /// First `hours` rows as a new series.
  TrafficSeries prefix(int hours) const {
    if (hours < 0 || hours > horizon)
      throw std::invalid_argument("prefix length out of range");
    TrafficSeries s;
    s.kind = kind;
    s.horizon = hours;
    s.series_count = series_count;
    s.values.assign(values.begin(),
                    values.begin() + static_cast<std::size_t>(hours) * series_count);
    return s;
  }

  void append_hour(const std::vector<int>& row) {
    if (static_cast<int>(row.size()) != series_count)
      throw std::invalid_argument("row width does not match series count");
    values.insert(values.end(), row.begin(), row.end());
    ++horizon;
  }

  std::int64_t total() const {
    std::int64_t s = 0;
    for (int v : values) s += v;
    return s;
  }

 private:
  void check_index(int hour, int series) const {
    if (hour < 1 || hour > horizon)
      throw std::out_of_range("hour " + std::to_string(hour) + " out of range [1," +
                              std::to_string(horizon) + "]");
    if (series < 0 || series >= series_count)
      throw std::out_of_range("series index " + std::to_string(series) + " out of range");
  }
};

/// Shape of the synthetic daily demand cycle. Every station gets its own
/// base level and peak hour, drawn deterministically from the seed, so the
/// system-wide peak is staggered rather than simultaneous.
struct SeasonalitySpec {
  double base_level = 20.0;      // mean hourly swaps per station
  double base_spread = 0.3;      // relative +/- spread of per-station base
  double amplitude = 3.0;        // peak height relative to base
  double peak_hour = 17.0;       // center of the daily peak, hour of day
  double peak_spread_hours = 6.0;   // per-station peak offset range
  double peak_width_hours = 3.0;    // gaussian width of the peak
  double noise = 0.15;           // relative multiplicative noise

  void validate() const {
    if (!(base_level >= 0)) throw std::invalid_argument("base_level must be >= 0");
    if (!(base_spread >= 0 && base_spread <= 1))
      throw std::invalid_argument("base_spread must be in [0,1]");
    if (!(amplitude >= 0)) throw std::invalid_argument("amplitude must be >= 0");
    if (!(peak_width_hours > 0))
      throw std::invalid_argument("peak_width_hours must be > 0");
    if (!(peak_spread_hours >= 0))
      throw std::invalid_argument("peak_spread_hours must be >= 0");
    if (!(noise >= 0 && noise < 1))
      throw std::invalid_argument("noise must be in [0,1)");
  }
};

namespace detail {

inline double circular_hour_distance(double a, double b) {
  double d = std::fmod(a - b, 24.0);
  if (d < -12.0) d += 24.0;
  if (d >= 12.0) d -= 24.0;
  return d;
}

}  // namespace detail

/// Generates `days` full days of hourly station demand. Deterministic for a
/// given (topology size, seed, spec); every value is an independent hash of
/// (seed, station, hour), so the output does not depend on traversal order.
inline TrafficSeries generate_synthetic(const Topology& topo, int days,
                                        std::uint64_t seed,
                                        const SeasonalitySpec& spec = {}) {
  if (days < 1) throw std::invalid_argument("days must be >= 1");
  spec.validate();
  const int stations = topo.station_count();
  const int horizon = 24 * days;
  TrafficSeries out = TrafficSeries::zeros(SeriesKind::kStationDemand, horizon, stations);

  constexpr std::uint64_t kBaseStream = 0xb1;
  constexpr std::uint64_t kPeakStream = 0xb2;
  constexpr std::uint64_t kNoiseStream = 0xb3;

  std::vector<double> base(stations), peak(stations);
  for (int i = 0; i < stations; ++i) {
    base[i] = spec.base_level *
              (1.0 + spec.base_spread * detail::to_symmetric(detail::hash3(seed, kBaseStream, i)));
    peak[i] = spec.peak_hour +
              spec.peak_spread_hours * detail::to_symmetric(detail::hash3(seed, kPeakStream, i));
  }

  const double w2 = 2.0 * spec.peak_width_hours * spec.peak_width_hours;
  for (int hour = 1; hour <= horizon; ++hour) {
    const double hod = (hour - 1) % 24;
    for (int i = 0; i < stations; ++i) {
      const double d = detail::circular_hour_distance(hod, peak[i]);
      const double profile = base[i] * (1.0 + spec.amplitude * std::exp(-d * d / w2));
      const double u = detail::to_symmetric(detail::hash4(seed, kNoiseStream, i, hour));
      const int v = round_half_up(profile * (1.0 + spec.noise * u));
      out.at(hour, i) = v < 0 ? 0 : v;
    }
  }
  return out;
}

/// Converts hourly road traffic per edge into station swap demand:
/// demand(t, i) = round(swap_rate * sum of traffic on edges incident to i).
inline TrafficSeries edge_to_station_demand(const TrafficSeries& traffic,
                                            const Topology& topo, double swap_rate) {
  if (traffic.kind != SeriesKind::kEdgeTraffic)
    throw std::invalid_argument("edge_to_station_demand needs an edge-traffic series");
  if (!(swap_rate >= 0 && swap_rate <= 1))
    throw std::invalid_argument("swap_rate must be in [0,1]");
  if (traffic.series_count != static_cast<int>(topo.edges().size()))
    throw std::invalid_argument("traffic has " + std::to_string(traffic.series_count) +
                                " series but topology has " +
                                std::to_string(topo.edges().size()) + " edges");

  TrafficSeries out =
      TrafficSeries::zeros(SeriesKind::kStationDemand, traffic.horizon, topo.station_count());
  for (int t = 1; t <= traffic.horizon; ++t) {
    for (int i = 0; i < topo.station_count(); ++i) {
      long long incident = 0;
      for (std::size_t e = 0; e < topo.edges().size(); ++e) {
        const auto& [a, b] = topo.edges()[e];
        if (a == i || b == i) incident += traffic.at(t, static_cast<int>(e));
      }
      out.at(t, i) = round_half_up(swap_rate * static_cast<double>(incident));
    }
  }
  return out;
}

/// Demand-shift perturbation: the selected series are rotated `shift_hours`
/// earlier in time (value at hour t comes from hour t + shift, wrapping).
struct ShiftSpec {
  std::vector<int> stations;
  int shift_hours = 0;
};

inline TrafficSeries apply_shift(const TrafficSeries& series, const ShiftSpec& spec) {
  if (spec.shift_hours < 0 || spec.shift_hours >= std::max(series.horizon, 1))
    throw std::invalid_argument("shift_hours must be in [0, horizon)");
  for (int s : spec.stations)
    if (s < 0 || s >= series.series_count)
      throw std::invalid_argument("shifted station index " + std::to_string(s) +
                                  " out of range");
  TrafficSeries out = series;
  if (spec.shift_hours == 0) return out;
  for (int s : spec.stations)
    for (int t = 1; t <= series.horizon; ++t)
      out.at(t, s) = series.at(1 + (t - 1 + spec.shift_hours) % series.horizon, s);
  return out;
}

/// Mean of each series over hours [from_hour, from_hour + hours).
inline std::vector<double> mean_per_series(const TrafficSeries& series, int from_hour,
                                           int hours) {
  if (hours < 1) throw std::invalid_argument("averaging window must cover >= 1 hour");
  if (from_hour < 1 || from_hour + hours - 1 > series.horizon)
    throw std::invalid_argument("averaging window out of range");
  std::vector<double> mean(series.series_count, 0.0);
  for (int t = from_hour; t < from_hour + hours; ++t)
    for (int i = 0; i < series.series_count; ++i) mean[i] += series.at(t, i);
  for (double& m : mean) m /= hours;
  return mean;
}

/// CSV layout:
///   # kind=station-demand
///   hour,series_0,series_1,...
///   1,12,7,...
inline void save_traffic_csv(const TrafficSeries& series, std::ostream& out) {
  out << "# kind=" << series_kind_name(series.kind) << "\n";
  out << "hour";
  for (int i = 0; i < series.series_count; ++i) out << ",series_" << i;
  out << "\n";
  for (int t = 1; t <= series.horizon; ++t) {
    out << t;
    for (int i = 0; i < series.series_count; ++i) out << ',' << series.at(t, i);
    out << "\n";
  }
}

inline void save_traffic_csv(const TrafficSeries& series, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write traffic file '" + path + "'");
  save_traffic_csv(series, out);
}

inline TrafficSeries load_traffic_csv(std::istream& in, const std::string& source) {
  const auto fail = [&](int line, const std::string& msg) -> void {
    throw std::runtime_error(source + ":" + std::to_string(line) + ": " + msg);
  };

  TrafficSeries series;
  series.kind = SeriesKind::kStationDemand;
  std::string raw;
  int line_no = 0;
  bool saw_header = false;
  int expected_hour = 1;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = detail::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view body = detail::trim(line.substr(1));
      if (body.rfind("kind=", 0) == 0) {
        const std::string_view kind = detail::trim(body.substr(5));
        if (kind == "edge-traffic")
          series.kind = SeriesKind::kEdgeTraffic;
        else if (kind == "station-demand")
          series.kind = SeriesKind::kStationDemand;
        else
          fail(line_no, "unknown series kind '" + std::string(kind) + "'");
      }
      continue;
    }
    if (!saw_header) {
      const auto fields = detail::split(line, ',');
      if (fields.empty() || detail::trim(fields[0]) != "hour")
        fail(line_no, "expected header starting with 'hour'");
      series.series_count = static_cast<int>(fields.size()) - 1;
      if (series.series_count < 1) fail(line_no, "header declares no series columns");
      saw_header = true;
      continue;
    }
    const auto fields = detail::split(line, ',');
    if (static_cast<int>(fields.size()) != series.series_count + 1)
      fail(line_no, "expected " + std::to_string(series.series_count + 1) +
                        " columns, got " + std::to_string(fields.size()));
    const long long hour = detail::parse_int(fields[0], "hour");
    if (hour != expected_hour)
      fail(line_no, "expected hour " + std::to_string(expected_hour) + ", got " +
                        std::to_string(hour));
    for (int i = 0; i < series.series_count; ++i) {
      const long long v = detail::parse_int(fields[i + 1], "series_" + std::to_string(i));
      if (v < 0) fail(line_no, "negative count in series_" + std::to_string(i));
      series.values.push_back(static_cast<int>(v));
    }
    ++expected_hour;
  }
  if (!saw_header)
    throw std::runtime_error(source + ": missing header row");
  series.horizon = expected_hour - 1;
  return series;
}

inline TrafficSeries load_traffic_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open traffic file '" + path + "'");
  return load_traffic_csv(in, path);
}

}  // namespace swapsched
