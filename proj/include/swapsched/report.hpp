#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "swapsched/experiments.hpp"
#include "swapsched/simulation.hpp"

namespace swapsched {

/// Plot-ready aggregation of a sweep: per axis value and policy, mean and
/// sample standard deviation of both metrics. Policies appear in first-row
/// order; values in first-appearance order, so output is deterministic.
inline nlohmann::ordered_json make_plot_json(const SweepSpec& spec,
                                             const std::vector<ResultRow>& rows) {
  std::vector<double> values;
  std::vector<Policy> policies;
  for (const auto& r : rows) {
    if (std::find(values.begin(), values.end(), r.axis_value) == values.end())
      values.push_back(r.axis_value);
    if (std::find(policies.begin(), policies.end(), r.policy) == policies.end())
      policies.push_back(r.policy);
  }

  const auto stats = [&](Policy p, double v, auto metric) {
    double sum = 0, count = 0;
    for (const auto& r : rows)
      if (r.policy == p && r.axis_value == v) {
        sum += metric(r);
        ++count;
      }
    const double mean = count > 0 ? sum / count : 0.0;
    double ss = 0;
    for (const auto& r : rows)
      if (r.policy == p && r.axis_value == v) ss += (metric(r) - mean) * (metric(r) - mean);
    const double stddev = count > 1 ? std::sqrt(ss / (count - 1)) : 0.0;
    return std::pair<double, double>(mean, stddev);
  };

  nlohmann::ordered_json doc;
  doc["axis"] = sweep_axis_name(spec.axis);
  doc["values"] = values;
  doc["repetitions"] = spec.repetitions;
  for (const char* metric_name : {"lost_ratio", "relative_to_oracle"}) {
    nlohmann::ordered_json series = nlohmann::ordered_json::array();
    for (Policy p : policies) {
      nlohmann::ordered_json entry;
      entry["policy"] = policy_name(p);
      std::vector<double> means, stddevs;
      for (double v : values) {
        const auto metric = [&](const ResultRow& r) {
          return std::string(metric_name) == "lost_ratio" ? r.cell.lost_ratio
                                                          : r.cell.relative_to_oracle;
        };
        const auto [mean, sd] = stats(p, v, metric);
        means.push_back(mean);
        stddevs.push_back(sd);
      }
      entry["mean"] = means;
      entry["stddev"] = stddevs;
      series.push_back(entry);
    }
    doc["metrics"][metric_name] = series;
  }
  return doc;
}

inline void write_plot_json(const SweepSpec& spec, const std::vector<ResultRow>& rows,
                            std::ostream& out) {
  out << make_plot_json(spec, rows).dump(2) << "\n";
}

/// Machine-readable summary of a single run.
inline nlohmann::ordered_json make_metrics_json(const Metrics& m) {
  nlohmann::ordered_json doc;
  doc["total_demand"] = m.total_demand;
  doc["total_lost"] = m.total_lost;
  doc["baseline_lost"] = m.baseline_lost;
  doc["lost_ratio"] = m.lost_ratio;
  if (std::isinf(m.relative_to_baseline))
    doc["relative_to_oracle"] = "inf";
  else
    doc["relative_to_oracle"] = m.relative_to_baseline;
  return doc;
}

}  // namespace swapsched
