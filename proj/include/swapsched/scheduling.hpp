#pragma once

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "swapsched/min_cost_flow.hpp"
#include "swapsched/topology.hpp"

namespace swapsched {

/// One mobile-battery scheduling problem: decide hourly relocations of the
/// mobile stock over `horizon` periods so as few swap requests as possible
/// go unserved. A battery serves demand at a station in a period only if it
/// is there for the whole period; a battery in transit serves nothing that
/// period. In the final period every battery present at its start serves,
/// since nothing is gained by moving on the last hour.
struct SchedulingInstance {
  Topology topo;
  int horizon = 0;
  std::vector<int> mobile_initial;   // per station, start of period 1
  std::vector<int> fixed_batteries;  // per station, never move
  std::vector<int> demand;           // horizon x stations, hour-major

  int stations() const { return topo.station_count(); }

  int demand_at(int t, StationId i) const {
    check_index(t, i);
    return demand[static_cast<std::size_t>(t - 1) * stations() + i];
  }

  int& demand_at(int t, StationId i) {
    check_index(t, i);
    return demand[static_cast<std::size_t>(t - 1) * stations() + i];
  }

  std::int64_t total_mobile() const {
    std::int64_t q = 0;
    for (int v : mobile_initial) q += v;
    return q;
  }

  void validate() const {
    const int s = stations();
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    if (static_cast<int>(mobile_initial.size()) != s)
      throw std::invalid_argument("mobile_initial size does not match station count");
    if (static_cast<int>(fixed_batteries.size()) != s)
      throw std::invalid_argument("fixed_batteries size does not match station count");
    if (demand.size() != static_cast<std::size_t>(horizon) * s)
      throw std::invalid_argument("demand must have horizon x stations entries");
    for (int v : mobile_initial)
      if (v < 0) throw std::invalid_argument("mobile_initial must be non-negative");
    for (int v : fixed_batteries)
      if (v < 0) throw std::invalid_argument("fixed_batteries must be non-negative");
    for (int v : demand)
      if (v < 0) throw std::invalid_argument("demand must be non-negative");
  }

 private:
  void check_index(int t, int i) const {
    if (t < 1 || t > horizon)
      throw std::out_of_range("period " + std::to_string(t) + " out of range");
    if (i < 0 || i >= stations())
      throw std::out_of_range("station " + std::to_string(i) + " out of range");
  }
};

/// Solved relocation schedule. moves_at(t, i, j) counts batteries that are
/// at i when period t starts and at j when period t ends; i == j means the
/// battery stayed (and served). In the final period every battery stays, so
/// moves_at(horizon, i, i) is the closing stock at i.
struct MovePlan {
  int horizon = 0;
  int stations = 0;
  std::vector<int> moves;  // horizon x stations x stations
  std::vector<int> lost;   // horizon x stations
  std::int64_t objective = 0;

  int moves_at(int t, int i, int j) const {
    return moves[(static_cast<std::size_t>(t - 1) * stations + i) * stations + j];
  }
  int& moves_at(int t, int i, int j) {
    return moves[(static_cast<std::size_t>(t - 1) * stations + i) * stations + j];
  }
  int lost_at(int t, int i) const {
    return lost[static_cast<std::size_t>(t - 1) * stations + i];
  }
  int& lost_at(int t, int i) {
    return lost[static_cast<std::size_t>(t - 1) * stations + i];
  }

  static MovePlan zeros(int horizon, int stations) {
    MovePlan p;
    p.horizon = horizon;
    p.stations = stations;
    p.moves.assign(static_cast<std::size_t>(horizon) * stations * stations, 0);
    p.lost.assign(static_cast<std::size_t>(horizon) * stations, 0);
    return p;
  }
};

enum class ScheduleArcKind {
  kMove,        // relocate i -> j over period `period`; serves nothing
  kStayServe,   // stay at i, capacity = unmet demand there, rewarded
  kStayFree,    // stay at i beyond what demand absorbs
  kFinalServe,  // final-period service at i, capacity = unmet demand
  kFinalFree,   // final-period idle stock at i
  kSource       // fleet-sizing arc: place one initial battery at i
};

inline const char* schedule_arc_kind_name(ScheduleArcKind k) {
  switch (k) {
    case ScheduleArcKind::kMove: return "move";
    case ScheduleArcKind::kStayServe: return "stay-serve";
    case ScheduleArcKind::kStayFree: return "stay-free";
    case ScheduleArcKind::kFinalServe: return "final-serve";
    case ScheduleArcKind::kFinalFree: return "final-free";
    case ScheduleArcKind::kSource: return "source";
  }
  return "?";
}

struct ScheduleArcTag {
  ScheduleArcKind kind;
  int period;  // 1..horizon
  int from;    // station, -1 for source arcs' origin
  int to;      // station
};

/// Time-expanded flow network for a SchedulingInstance. Layer t
/// (t = 0..horizon-1) holds one node per station meaning "battery is at
/// this station when period t+1 starts". Transition arcs between layers
/// carry the period-(t+1) relocation decision; the last layer drains into a
/// sink through per-station service arcs, because in the final period every
/// battery present can serve where it stands. tags[] parallels net.arcs.
struct ScheduleNetwork {
  FlowNetwork net;
  std::vector<ScheduleArcTag> tags;
  int horizon = 0;
  int stations = 0;
  int sink = -1;
  int source = -1;  // only used by the fleet-sizing variant

  int node_of(int layer, int station) const { return layer * stations + station; }
};

namespace detail {

struct SourceSpec {
  std::int64_t total = 0;
  std::vector<std::int64_t> caps;  // per-station cap on initial placement
};

inline ScheduleNetwork build_schedule_network_impl(const SchedulingInstance& inst,
                                                   std::int64_t serve_reward,
                                                   std::int64_t move_cost,
                                                   const SourceSpec* source) {
  inst.validate();
  const int s = inst.stations();
  const int T = inst.horizon;

  ScheduleNetwork sn;
  sn.horizon = T;
  sn.stations = s;
  for (int layer = 0; layer < T; ++layer)
    for (int i = 0; i < s; ++i) sn.net.add_node();
  sn.sink = sn.net.add_node();

  std::int64_t total = 0;
  for (int i = 0; i < s; ++i) {
    sn.net.supplies[sn.node_of(0, i)] = inst.mobile_initial[i];
    total += inst.mobile_initial[i];
  }
  if (source != nullptr) {
    sn.source = sn.net.add_node();
    sn.net.supplies[sn.source] = source->total;
    total += source->total;
  }
  sn.net.supplies[sn.sink] = -total;

  const auto add = [&](int from, int to, std::int64_t cap, std::int64_t cost,
                       ScheduleArcKind kind, int period, int si, int sj) {
    sn.net.add_arc(from, to, cap, cost);
    sn.tags.push_back({kind, period, si, sj});
  };
  const auto serve_cap = [&](int t, int i) -> std::int64_t {
    return std::max(0, inst.demand_at(t, i) - inst.fixed_batteries[i]);
  };

  for (int t = 1; t <= T - 1; ++t) {
    for (int i = 0; i < s; ++i) {
      const int u = sn.node_of(t - 1, i);
      const int v = sn.node_of(t, i);
      add(u, v, serve_cap(t, i), -serve_reward, ScheduleArcKind::kStayServe, t, i, i);
      add(u, v, FlowNetwork::kUnbounded, 0, ScheduleArcKind::kStayFree, t, i, i);
      for (int j : inst.topo.neighbors(i))
        add(u, sn.node_of(t, j), FlowNetwork::kUnbounded, move_cost,
            ScheduleArcKind::kMove, t, i, j);
    }
  }
  for (int i = 0; i < s; ++i) {
    const int u = sn.node_of(T - 1, i);
    add(u, sn.sink, serve_cap(T, i), -serve_reward, ScheduleArcKind::kFinalServe, T, i, i);
    add(u, sn.sink, FlowNetwork::kUnbounded, 0, ScheduleArcKind::kFinalFree, T, i, i);
  }
  if (source != nullptr) {
    for (int i = 0; i < s; ++i)
      add(sn.source, sn.node_of(0, i), source->caps[i], 0, ScheduleArcKind::kSource, 0,
          -1, i);
  }
  return sn;
}

}  // namespace detail

/// Public network with unit service rewards: serve arcs cost -1, every
/// other arc costs 0. The optimum of this network relates to the schedule
/// objective by: total lost = sum over (t,i) of max(0, D - F) + min cost.
inline ScheduleNetwork build_time_expanded_network(const SchedulingInstance& inst) {
  return detail::build_schedule_network_impl(inst, 1, 0, nullptr);
}

/// Total demand left over if no mobile battery ever serves:
/// sum over (t, i) of max(0, demand - fixed).
inline std::int64_t base_lost(const SchedulingInstance& inst) {
  inst.validate();
  std::int64_t sum = 0;
  for (int t = 1; t <= inst.horizon; ++t)
    for (int i = 0; i < inst.stations(); ++i)
      sum += std::max(0, inst.demand_at(t, i) - inst.fixed_batteries[i]);
  return sum;
}

/// Reconstructs the relocation schedule from a solved flow on a network
/// built for this instance. Throws std::runtime_error("inconsistent flow")
/// if the flow does not describe a valid schedule (wrong size, conservation
/// violated, capacity exceeded).
inline MovePlan extract_plan(const SchedulingInstance& inst, const ScheduleNetwork& sn,
                             const FlowResult& flow) {
  inst.validate();
  const int s = inst.stations();
  const int T = inst.horizon;
  if (sn.stations != s || sn.horizon != T ||
      flow.arc_flow.size() != sn.net.arcs.size())
    throw std::runtime_error("inconsistent flow: shape mismatch");

  MovePlan plan = MovePlan::zeros(T, s);
  std::vector<std::int64_t> stock(s);
  for (int i = 0; i < s; ++i) stock[i] = inst.mobile_initial[i];

  for (std::size_t a = 0; a < sn.tags.size(); ++a) {
    const auto& tag = sn.tags[a];
    const std::int64_t f = flow.arc_flow[a];
    if (f < 0 || (sn.net.arcs[a].capacity != FlowNetwork::kUnbounded &&
                  f > sn.net.arcs[a].capacity))
      throw std::runtime_error("inconsistent flow: arc flow out of bounds");
    switch (tag.kind) {
      case ScheduleArcKind::kMove:
      case ScheduleArcKind::kStayServe:
      case ScheduleArcKind::kStayFree:
        plan.moves_at(tag.period, tag.from, tag.to) += static_cast<int>(f);
        break;
      case ScheduleArcKind::kSource:
        stock[tag.to] += f;
        break;
      default:
        break;  // final-layer service arcs carry no relocation information
    }
  }

  // Walk the layers: per-period conservation, then the all-stay last period.
  for (int t = 1; t <= T - 1; ++t) {
    std::vector<std::int64_t> next(s, 0);
    for (int i = 0; i < s; ++i) {
      std::int64_t out = 0;
      for (int j = 0; j < s; ++j) {
        out += plan.moves_at(t, i, j);
        next[j] += plan.moves_at(t, i, j);
      }
      if (out != stock[i]) throw std::runtime_error("inconsistent flow: conservation violated");
    }
    for (int i = 0; i < s; ++i)
      plan.lost_at(t, i) = std::max(
          0, inst.demand_at(t, i) - inst.fixed_batteries[i] - plan.moves_at(t, i, i));
    stock = next;
  }
  for (int i = 0; i < s; ++i) {
    plan.moves_at(T, i, i) = static_cast<int>(stock[i]);
    plan.lost_at(T, i) = std::max(
        0, inst.demand_at(T, i) - inst.fixed_batteries[i] - static_cast<int>(stock[i]));
  }
  plan.objective = 0;
  for (int v : plan.lost) plan.objective += v;
  return plan;
}

/// Solves the scheduling problem exactly. Among schedules with minimum lost
/// demand, one with the fewest relocations is returned, so batteries never
/// move without cause (zero forecast keeps everyone in place).
inline MovePlan solve_schedule(const SchedulingInstance& inst) {
  inst.validate();
  // Service reward large enough that one served request always outweighs
  // any conceivable total movement cost; movement then acts as a pure
  // tie-breaker among loss-optimal schedules.
  const std::int64_t reward = inst.total_mobile() * inst.horizon + 1;
  const ScheduleNetwork sn = detail::build_schedule_network_impl(inst, reward, 1, nullptr);
  const FlowResult flow = solve_min_cost_flow(sn.net);
  return extract_plan(inst, sn, flow);
}

/// Exhaustive reference solver: enumerates every per-battery trajectory
/// combination. Only for tiny instances; throws std::invalid_argument
/// beyond 4 stations, horizon 4, or 3 mobile batteries.
inline MovePlan brute_force_schedule(const SchedulingInstance& inst) {
  inst.validate();
  const int s = inst.stations();
  const int T = inst.horizon;
  if (s > 4 || T > 4 || inst.total_mobile() > 3)
    throw std::invalid_argument(
        "brute_force_schedule handles at most 4 stations, horizon 4, 3 mobile batteries");

  // All station sequences (positions at the start of each period) a single
  // battery can follow from a given origin.
  std::vector<std::vector<std::vector<int>>> trajectories(s);
  for (int origin = 0; origin < s; ++origin) {
    std::vector<int> current{origin};
    const auto grow = [&](auto&& self, int depth) -> void {
      if (depth == T) {
        trajectories[origin].push_back(current);
        return;
      }
      const int here = current.back();
      current.push_back(here);
      self(self, depth + 1);
      current.pop_back();
      for (int j : inst.topo.neighbors(here)) {
        current.push_back(j);
        self(self, depth + 1);
        current.pop_back();
      }
    };
    grow(grow, 1);
  }

  std::vector<int> origins;
  for (int i = 0; i < s; ++i)
    for (int k = 0; k < inst.mobile_initial[i]; ++k) origins.push_back(i);
  const int batteries = static_cast<int>(origins.size());

  const auto evaluate = [&](const std::vector<int>& choice) {
    std::int64_t total = 0;
    for (int t = 1; t <= T; ++t)
      for (int i = 0; i < s; ++i) {
        int available = 0;
        for (int b = 0; b < batteries; ++b) {
          const auto& traj = trajectories[origins[b]][choice[b]];
          const bool serves =
              t < T ? (traj[t - 1] == i && traj[t] == i) : traj[T - 1] == i;
          if (serves) ++available;
        }
        total +=
            std::max(0, inst.demand_at(t, i) - inst.fixed_batteries[i] - available);
      }
    return total;
  };

  std::vector<int> choice(batteries, 0), best_choice(batteries, 0);
  std::int64_t best = evaluate(choice);
  const auto search = [&](auto&& self, int b) -> void {
    if (b == batteries) {
      const std::int64_t value = evaluate(choice);
      if (value < best) {
        best = value;
        best_choice = choice;
      }
      return;
    }
    // Batteries sharing an origin are interchangeable; forcing their
    // trajectory indices non-decreasing skips permuted duplicates.
    const int low = (b > 0 && origins[b - 1] == origins[b]) ? choice[b - 1] : 0;
    const int count = static_cast<int>(trajectories[origins[b]].size());
    for (int c = low; c < count; ++c) {
      choice[b] = c;
      self(self, b + 1);
    }
  };
  if (batteries > 0) search(search, 0);

  MovePlan plan = MovePlan::zeros(T, s);
  for (int b = 0; b < batteries; ++b) {
    const auto& traj = trajectories[origins[b]][best_choice[b]];
    for (int t = 1; t <= T - 1; ++t) ++plan.moves_at(t, traj[t - 1], traj[t]);
    ++plan.moves_at(T, traj[T - 1], traj[T - 1]);
  }
  for (int t = 1; t <= T; ++t)
    for (int i = 0; i < s; ++i) {
      const int available = t < T ? plan.moves_at(t, i, i) : plan.moves_at(T, i, i);
      plan.lost_at(t, i) =
          std::max(0, inst.demand_at(t, i) - inst.fixed_batteries[i] - available);
      plan.objective += plan.lost_at(t, i);
    }
  return plan;
}

inline std::string to_debug_string(const ScheduleNetwork& sn) {
  std::ostringstream out;
  out << "layers " << sn.horizon << " stations " << sn.stations << " sink " << sn.sink;
  if (sn.source >= 0) out << " source " << sn.source;
  out << "\n";
  for (std::size_t a = 0; a < sn.tags.size(); ++a) {
    const auto& tag = sn.tags[a];
    const auto& arc = sn.net.arcs[a];
    out << schedule_arc_kind_name(tag.kind) << " t=" << tag.period;
    if (tag.from >= 0) out << " " << tag.from << "->" << tag.to;
    else out << " ->" << tag.to;
    out << " cap ";
    if (arc.capacity == FlowNetwork::kUnbounded) out << "inf";
    else out << arc.capacity;
    out << " cost " << arc.unit_cost << "\n";
  }
  return out.str();
}

inline std::string to_debug_string(const MovePlan& plan) {
  std::ostringstream out;
  out << "objective " << plan.objective << "\n";
  for (int t = 1; t <= plan.horizon; ++t) {
    out << "period " << t << ":";
    bool any = false;
    for (int i = 0; i < plan.stations; ++i)
      for (int j = 0; j < plan.stations; ++j)
        if (plan.moves_at(t, i, j) > 0) {
          out << " " << i << "->" << j << " x" << plan.moves_at(t, i, j);
          any = true;
        }
    if (!any) out << " (none)";
    out << "\n";
    for (int i = 0; i < plan.stations; ++i)
      if (plan.lost_at(t, i) > 0)
        out << "  lost t=" << t << " station=" << i << ": " << plan.lost_at(t, i) << "\n";
  }
  return out.str();
}

}  // namespace swapsched
