#include "swapsched/traffic.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "support/generators.hpp"

using namespace swapsched;

namespace {

TrafficSeries random_series(testsupport::Rng& rng, SeriesKind kind, int horizon,
                            int count, int max_value = 9) {
  TrafficSeries s = TrafficSeries::zeros(kind, horizon, count);
  for (auto& v : s.values) v = rng.uniform(0, max_value);
  return s;
}

}  // namespace

TEST(Traffic, RoundHalfUp) {
  EXPECT_EQ(round_half_up(0.0), 0);
  EXPECT_EQ(round_half_up(0.49), 0);
  EXPECT_EQ(round_half_up(0.5), 1);
  EXPECT_EQ(round_half_up(1.5), 2);
  EXPECT_EQ(round_half_up(2.4), 2);
  EXPECT_EQ(round_half_up(17.999), 18);
}

TEST(Traffic, SeriesShapeOps) {
  TrafficSeries s = TrafficSeries::zeros(SeriesKind::kStationDemand, 3, 2);
  s.at(2, 1) = 5;
  EXPECT_EQ(s.at(2, 1), 5);
  EXPECT_EQ(s.at(1, 0), 0);
  EXPECT_THROW(s.at(0, 0), std::out_of_range);
  EXPECT_THROW(s.at(4, 0), std::out_of_range);
  EXPECT_THROW(s.at(1, 2), std::out_of_range);

  const TrafficSeries p = s.prefix(2);
  EXPECT_EQ(p.horizon, 2);
  EXPECT_EQ(p.at(2, 1), 5);
  EXPECT_THROW(s.prefix(4), std::invalid_argument);

  TrafficSeries q = s.prefix(0);
  EXPECT_EQ(q.horizon, 0);
  q.append_hour({7, 8});
  EXPECT_EQ(q.horizon, 1);
  EXPECT_EQ(q.at(1, 0), 7);
  EXPECT_THROW(q.append_hour({1}), std::invalid_argument);
}

TEST(Traffic, SyntheticDeterministicAndSeedSensitive) {
  const Topology topo = make_ring(6);
  const TrafficSeries a = generate_synthetic(topo, 2, 42);
  const TrafficSeries b = generate_synthetic(topo, 2, 42);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.horizon, 48);
  EXPECT_EQ(a.series_count, 6);
  EXPECT_EQ(a.kind, SeriesKind::kStationDemand);

  const TrafficSeries c = generate_synthetic(topo, 2, 43);
  EXPECT_NE(a.values, c.values);
}

TEST(Traffic, SyntheticNonNegative) {
  SeasonalitySpec spec;
  spec.noise = 0.99;
  spec.base_level = 2.0;
  const TrafficSeries s = generate_synthetic(make_ring(5), 3, 9, spec);
  for (int v : s.values) ASSERT_GE(v, 0);
}

TEST(Traffic, SyntheticPeriodicWithoutNoise) {
  SeasonalitySpec spec;
  spec.noise = 0.0;
  const TrafficSeries s = generate_synthetic(make_ring(4), 3, 5, spec);
  for (int t = 1; t + 24 <= s.horizon; ++t)
    for (int i = 0; i < s.series_count; ++i)
      ASSERT_EQ(s.at(t, i), s.at(t + 24, i)) << "t=" << t << " i=" << i;
}

// With per-station spreads disabled, the expected hourly profile has a
// closed form; sample means over 30 days must track it within 5%.
TEST(Traffic, SyntheticMeanMatchesProfile) {
  SeasonalitySpec spec;
  spec.base_level = 20;
  spec.base_spread = 0;
  spec.peak_spread_hours = 0;
  spec.noise = 0.2;
  const int days = 30;
  const Topology topo = make_ring(8);
  const TrafficSeries s = generate_synthetic(topo, days, 1234, spec);

  const double w2 = 2.0 * spec.peak_width_hours * spec.peak_width_hours;
  for (int hod = 0; hod < 24; ++hod) {
    const double d = detail::circular_hour_distance(hod, spec.peak_hour);
    const double expected = spec.base_level * (1.0 + spec.amplitude * std::exp(-d * d / w2));
    double sum = 0;
    int n = 0;
    for (int day = 0; day < days; ++day)
      for (int i = 0; i < topo.station_count(); ++i) {
        sum += s.at(day * 24 + hod + 1, i);
        ++n;
      }
    const double mean = sum / n;
    EXPECT_NEAR(mean, expected, 0.05 * expected) << "hour of day " << hod;
  }
}

TEST(Traffic, SyntheticValidation) {
  const Topology topo = make_ring(3);
  SeasonalitySpec bad;
  bad.base_level = -1;
  EXPECT_THROW(generate_synthetic(topo, 1, 1, bad), std::invalid_argument);
  bad = {};
  bad.noise = 1.0;
  EXPECT_THROW(generate_synthetic(topo, 1, 1, bad), std::invalid_argument);
  EXPECT_THROW(generate_synthetic(topo, 0, 1), std::invalid_argument);
}

TEST(Traffic, EdgeConversionExamples) {
  // Path A-B-C with known edge counts: incident sums scale by the rate.
  const Topology topo = make_path(3);
  TrafficSeries edges = TrafficSeries::zeros(SeriesKind::kEdgeTraffic, 1, 2);
  edges.at(1, 0) = 4;  // A-B
  edges.at(1, 1) = 6;  // B-C
  const TrafficSeries demand = edge_to_station_demand(edges, topo, 0.5);
  EXPECT_EQ(demand.kind, SeriesKind::kStationDemand);
  EXPECT_EQ(demand.at(1, 0), 2);
  EXPECT_EQ(demand.at(1, 1), 5);
  EXPECT_EQ(demand.at(1, 2), 3);

  const TrafficSeries zero_rate = edge_to_station_demand(edges, topo, 0.0);
  for (int v : zero_rate.values) EXPECT_EQ(v, 0);
}

TEST(Traffic, EdgeConversionMonotone) {
  testsupport::Rng rng(99);
  const Topology topo = testsupport::random_topology(rng, 6, false);
  const int edge_count = static_cast<int>(topo.edges().size());
  ASSERT_GT(edge_count, 0);
  TrafficSeries base = random_series(rng, SeriesKind::kEdgeTraffic, 5, edge_count);
  const TrafficSeries before = edge_to_station_demand(base, topo, 0.3);

  const int e = rng.uniform(0, edge_count - 1);
  base.at(3, e) += 7;
  const TrafficSeries after = edge_to_station_demand(base, topo, 0.3);
  const auto [a, b] = topo.edges()[e];
  for (int i = 0; i < topo.station_count(); ++i) {
    if (i == a || i == b)
      EXPECT_GE(after.at(3, i), before.at(3, i));
    else
      EXPECT_EQ(after.at(3, i), before.at(3, i));
  }
}

TEST(Traffic, EdgeConversionValidation) {
  const Topology topo = make_path(3);
  TrafficSeries wrong_kind = TrafficSeries::zeros(SeriesKind::kStationDemand, 1, 2);
  EXPECT_THROW(edge_to_station_demand(wrong_kind, topo, 0.5), std::invalid_argument);
  TrafficSeries wrong_count = TrafficSeries::zeros(SeriesKind::kEdgeTraffic, 1, 3);
  EXPECT_THROW(edge_to_station_demand(wrong_count, topo, 0.5), std::invalid_argument);
  TrafficSeries ok = TrafficSeries::zeros(SeriesKind::kEdgeTraffic, 1, 2);
  EXPECT_THROW(edge_to_station_demand(ok, topo, 1.5), std::invalid_argument);
}

TEST(Traffic, ShiftExamples) {
  TrafficSeries s = TrafficSeries::zeros(SeriesKind::kStationDemand, 4, 1);
  for (int t = 1; t <= 4; ++t) s.at(t, 0) = t;

  const TrafficSeries shifted = apply_shift(s, {{0}, 1});
  EXPECT_EQ(shifted.at(1, 0), 2);
  EXPECT_EQ(shifted.at(2, 0), 3);
  EXPECT_EQ(shifted.at(3, 0), 4);
  EXPECT_EQ(shifted.at(4, 0), 1);

  const TrafficSeries identity = apply_shift(s, {{0}, 0});
  EXPECT_EQ(identity.values, s.values);

  // A 24-periodic series is invariant under a 24-hour shift.
  TrafficSeries periodic = TrafficSeries::zeros(SeriesKind::kStationDemand, 48, 2);
  for (int t = 1; t <= 48; ++t)
    for (int i = 0; i < 2; ++i) periodic.at(t, i) = ((t - 1) % 24) + i;
  const TrafficSeries day = apply_shift(periodic, {{0, 1}, 24});
  EXPECT_EQ(day.values, periodic.values);
}

TEST(Traffic, ShiftPreservesMultisetAndOthers) {
  testsupport::Rng rng(2023);
  TrafficSeries s = random_series(rng, SeriesKind::kStationDemand, 30, 4);
  const TrafficSeries shifted = apply_shift(s, {{1, 3}, 7});

  for (int i : {1, 3}) {
    std::vector<int> a, b;
    for (int t = 1; t <= 30; ++t) {
      a.push_back(s.at(t, i));
      b.push_back(shifted.at(t, i));
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b);
  }
  for (int i : {0, 2})
    for (int t = 1; t <= 30; ++t) ASSERT_EQ(shifted.at(t, i), s.at(t, i));
}

TEST(Traffic, ShiftValidation) {
  TrafficSeries s = TrafficSeries::zeros(SeriesKind::kStationDemand, 10, 2);
  EXPECT_THROW(apply_shift(s, {{0}, 10}), std::invalid_argument);
  EXPECT_THROW(apply_shift(s, {{0}, -1}), std::invalid_argument);
  EXPECT_THROW(apply_shift(s, {{2}, 1}), std::invalid_argument);
}

TEST(Traffic, MeanPerSeries) {
  TrafficSeries s = TrafficSeries::zeros(SeriesKind::kStationDemand, 4, 2);
  s.at(1, 0) = 2;
  s.at(2, 0) = 4;
  s.at(3, 1) = 9;
  const std::vector<double> m = mean_per_series(s, 1, 2);
  EXPECT_DOUBLE_EQ(m[0], 3.0);
  EXPECT_DOUBLE_EQ(m[1], 0.0);
  EXPECT_THROW(mean_per_series(s, 0, 2), std::invalid_argument);
  EXPECT_THROW(mean_per_series(s, 3, 5), std::invalid_argument);
  EXPECT_THROW(mean_per_series(s, 1, 0), std::invalid_argument);
}

TEST(Traffic, CsvRoundTrip) {
  testsupport::Rng rng(555);
  for (SeriesKind kind : {SeriesKind::kStationDemand, SeriesKind::kEdgeTraffic}) {
    const TrafficSeries original = random_series(rng, kind, 12, 3);
    std::ostringstream out;
    save_traffic_csv(original, out);
    std::istringstream in(out.str());
    const TrafficSeries loaded = load_traffic_csv(in, "roundtrip");
    EXPECT_EQ(loaded.kind, original.kind);
    EXPECT_EQ(loaded.horizon, original.horizon);
    EXPECT_EQ(loaded.series_count, original.series_count);
    EXPECT_EQ(loaded.values, original.values);
  }
}

TEST(Traffic, CsvParseErrors) {
  const auto expect_error_at = [](const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    try {
      load_traffic_csv(in, "traffic.csv");
      FAIL() << "expected parse error for: " << text;
    } catch (const std::runtime_error& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_error_at("time,series_0\n1,2\n", "hour");
  expect_error_at("hour,series_0\n2,5\n", "expected hour 1");
  expect_error_at("hour,series_0\n1,5\n1,5\n", "traffic.csv:3");
  expect_error_at("hour,series_0\n1,-2\n", "negative");
  expect_error_at("hour,series_0\n1,2,3\n", "columns");
  expect_error_at("# kind=quarterly\nhour,series_0\n1,2\n", "kind");
  expect_error_at("", "header");
}
