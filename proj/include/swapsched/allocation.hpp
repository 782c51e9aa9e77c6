#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "swapsched/scheduling.hpp"
#include "swapsched/traffic.hpp"

namespace swapsched {

struct FleetSize {
  int total = 0;
  int mobile_total = 0;
  int fixed_total = 0;
};

/// Fleet sizing knobs: the inventory level scales the battery count against
/// average hourly demand, and mobile_ratio splits the fleet into a mobile
/// part (relocatable every hour) and a fixed part (pinned to stations).
struct FleetConfig {
  double inventory_level = 0.75;
  double mobile_ratio = 0.3;

  void validate() const {
    if (!(inventory_level >= 0) || !std::isfinite(inventory_level))
      throw std::invalid_argument("inventory_level must be a finite value >= 0");
    if (!(mobile_ratio >= 0 && mobile_ratio <= 1))
      throw std::invalid_argument("mobile_ratio must be in [0,1]");
  }

  FleetSize derive(const std::vector<double>& avg_demand) const {
    validate();
    double sum = 0;
    for (double a : avg_demand) {
      if (!(a >= 0) || !std::isfinite(a))
        throw std::invalid_argument("average demand must be finite and >= 0");
      sum += a;
    }
    FleetSize size;
    size.total = round_half_up(inventory_level * sum);
    size.mobile_total = round_half_up(mobile_ratio * size.total);
    size.fixed_total = size.total - size.mobile_total;
    return size;
  }
};

/// Splits `fixed_total` batteries across stations proportionally to average
/// demand, by largest remainder; remainder ties go to the lower station
/// index. Exact: the result always sums to fixed_total. Throws if every
/// average is zero while fixed_total > 0.
inline std::vector<int> allocate_fixed(const std::vector<double>& avg_demand,
                                       int fixed_total) {
  if (fixed_total < 0) throw std::invalid_argument("fixed_total must be >= 0");
  double sum = 0;
  for (double a : avg_demand) {
    if (!(a >= 0) || !std::isfinite(a))
      throw std::invalid_argument("average demand must be finite and >= 0");
    sum += a;
  }
  const int s = static_cast<int>(avg_demand.size());
  std::vector<int> fixed(s, 0);
  if (fixed_total == 0) return fixed;
  if (sum <= 0)
    throw std::invalid_argument(
        "cannot place fixed batteries: average demand is zero everywhere");

  std::vector<double> frac(s);
  int placed = 0;
  for (int i = 0; i < s; ++i) {
    const double quota = fixed_total * avg_demand[i] / sum;
    fixed[i] = static_cast<int>(std::floor(quota));
    frac[i] = quota - fixed[i];
    placed += fixed[i];
  }
  std::vector<int> order(s);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return frac[a] > frac[b]; });
  for (int k = 0; k < fixed_total - placed; ++k) ++fixed[order[k]];
  return fixed;
}

namespace detail {

inline std::int64_t placement_optimum(const SchedulingInstance& base,
                                      const std::vector<int>& prefix, int capped_station,
                                      std::int64_t cap, std::int64_t source_total,
                                      std::int64_t serve_reward) {
  SchedulingInstance inst = base;
  inst.mobile_initial = prefix;
  SourceSpec src;
  src.total = source_total;
  src.caps.assign(base.stations(), FlowNetwork::kUnbounded);
  for (int j = 0; j < capped_station; ++j) src.caps[j] = 0;
  if (capped_station >= 0 && capped_station < base.stations())
    src.caps[capped_station] = cap;
  const ScheduleNetwork sn = build_schedule_network_impl(inst, serve_reward, 1, &src);
  const FlowResult flow = solve_min_cost_flow(sn.net);
  return extract_plan(inst, sn, flow).objective;
}

}  // namespace detail

/// Chooses where the mobile fleet starts: the initial placement that
/// minimizes lost demand over the given horizon, assuming relocations are
/// re-optimized afterwards. Placement is a decision variable of the same
/// network, fed by one extra source node. Among optimal placements the
/// lexicographically smallest station vector is returned, which makes the
/// result unique and reproducible.
inline std::vector<int> allocate_mobile_initial(const Topology& topo, int horizon,
                                                const std::vector<int>& fixed,
                                                const std::vector<int>& demand,
                                                int mobile_total) {
  if (mobile_total < 0) throw std::invalid_argument("mobile_total must be >= 0");
  SchedulingInstance base;
  base.topo = topo;
  base.horizon = horizon;
  base.mobile_initial.assign(topo.station_count(), 0);
  base.fixed_batteries = fixed;
  base.demand = demand;
  base.validate();

  const int s = topo.station_count();
  std::vector<int> placement(s, 0);
  if (mobile_total == 0 || s == 0) return placement;

  const std::int64_t reward = static_cast<std::int64_t>(mobile_total) * horizon + 1;
  const std::int64_t best =
      detail::placement_optimum(base, placement, -1, 0, mobile_total, reward);

  // Fix stations left to right, each time taking the smallest count that
  // still admits a completion reaching the unconstrained optimum.
  int remaining = mobile_total;
  std::vector<int> prefix(s, 0);
  for (int i = 0; i < s && remaining > 0; ++i) {
    if (i == s - 1) {
      placement[i] = remaining;
      remaining = 0;
      break;
    }
    int lo = 0, hi = remaining;
    while (lo < hi) {
      const int mid = lo + (hi - lo) / 2;
      const std::int64_t value =
          detail::placement_optimum(base, prefix, i, mid, remaining, reward);
      if (value == best)
        hi = mid;
      else
        lo = mid + 1;
    }
    placement[i] = lo;
    prefix[i] = lo;
    remaining -= lo;
  }
  return placement;
}

}  // namespace swapsched
