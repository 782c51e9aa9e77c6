#pragma once

#include <stdexcept>
#include <vector>

#include "swapsched/forecast.hpp"
#include "swapsched/scheduling.hpp"
#include "swapsched/topology.hpp"

namespace swapsched {

/// Rolling-horizon control: how far ahead to plan and which forecaster
/// feeds the plan. Only the first hour of each plan is ever executed.
struct PolicyConfig {
  int h = 6;  // lookahead in hours, truncated near the end of a run
  ForecasterSpec forecaster;

  void validate() const {
    if (h < 1 || h > 24)
      throw std::invalid_argument("lookahead h must be in [1,24]");
    forecaster.validate();
  }
};

/// The executed slice of a plan: relocation counts for one hour.
/// counts(i, j) batteries leave i for adjacent j; counts(i, i) stay put and
/// can serve demand this hour.
struct FirstStepMoves {
  int stations = 0;
  std::vector<int> counts;  // stations x stations, from-major

  int at(int from, int to) const {
    return counts[static_cast<std::size_t>(from) * stations + to];
  }
  int& at(int from, int to) {
    return counts[static_cast<std::size_t>(from) * stations + to];
  }
  int stayed(int i) const { return at(i, i); }

  int outflow(int i) const {
    int sum = 0;
    for (int j = 0; j < stations; ++j) sum += at(i, j);
    return sum;
  }
  int inflow(int j) const {
    int sum = 0;
    for (int i = 0; i < stations; ++i) sum += at(i, j);
    return sum;
  }

  static FirstStepMoves zeros(int stations) {
    FirstStepMoves m;
    m.stations = stations;
    m.counts.assign(static_cast<std::size_t>(stations) * stations, 0);
    return m;
  }
};

/// Plans one control step: integerizes the forecast window into a
/// scheduling instance starting from the current battery positions, solves
/// it exactly, and returns only the first-period moves. With a lookahead of
/// one, or an all-zero forecast, every battery stays where it is.
inline FirstStepMoves plan_step(const std::vector<int>& positions,
                                const std::vector<int>& fixed,
                                const ForecastWindow& forecast, const Topology& topo,
                                const PolicyConfig& cfg) {
  cfg.validate();
  const int s = topo.station_count();
  if (static_cast<int>(positions.size()) != s)
    throw std::invalid_argument("positions size does not match station count");
  if (static_cast<int>(fixed.size()) != s)
    throw std::invalid_argument("fixed size does not match station count");
  if (forecast.stations != s)
    throw std::invalid_argument("forecast station count does not match topology");
  if (forecast.steps != cfg.h)
    throw std::invalid_argument("forecast covers " + std::to_string(forecast.steps) +
                                " steps but the policy plans " + std::to_string(cfg.h));

  SchedulingInstance inst;
  inst.topo = topo;
  inst.horizon = cfg.h;
  inst.mobile_initial = positions;
  inst.fixed_batteries = fixed;
  inst.demand.resize(static_cast<std::size_t>(cfg.h) * s);
  for (int t = 1; t <= cfg.h; ++t)
    for (int i = 0; i < s; ++i)
      inst.demand_at(t, i) = round_half_up(forecast.at(t, i));

  const MovePlan plan = solve_schedule(inst);
  FirstStepMoves moves = FirstStepMoves::zeros(s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) moves.at(i, j) = plan.moves_at(1, i, j);
  return moves;
}

}  // namespace swapsched
