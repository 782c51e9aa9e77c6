// Minimal library walkthrough: build a 3-station path, craft a demand wave
// that travels along it, solve the hindsight schedule, and then replay the
// same scenario with a rolling-horizon policy fed by a noisy forecaster.

#include <iostream>

#include "swapsched/experiments.hpp"

using namespace swapsched;

int main() {
  const Topology topo = make_path(3);

  // Three hours of demand: a spike that moves A -> B -> C.
  SchedulingInstance inst;
  inst.topo = topo;
  inst.horizon = 3;
  inst.mobile_initial = {2, 0, 0};
  inst.fixed_batteries = {0, 0, 0};
  inst.demand = {
      2, 0, 0,  // hour 1
      0, 2, 0,  // hour 2
      0, 0, 2,  // hour 3
  };

  std::cout << "=== hindsight schedule ===\n";
  const MovePlan plan = solve_schedule(inst);
  std::cout << to_debug_string(plan);
  std::cout << "lost demand: " << plan.objective << "\n\n";

  // The same demand as a realized series (no warmup history needed for the
  // oracle forecasters).
  TrafficSeries actual = TrafficSeries::zeros(SeriesKind::kStationDemand, 3, 3);
  for (int t = 1; t <= 3; ++t)
    for (int i = 0; i < 3; ++i) actual.at(t, i) = inst.demand_at(t, i);

  std::cout << "=== rolling horizon, noisy forecasts ===\n";
  PolicyConfig pc;
  pc.h = 3;
  pc.forecaster.kind = ForecasterKind::kNoisyOracle;
  pc.forecaster.noise = 0.25;
  pc.forecaster.seed = 7;
  const SimulationTrace trace =
      run_simulation(topo, actual, inst.mobile_initial, inst.fixed_batteries, pc, 1, 3);
  for (const auto& rec : trace.records) {
    std::cout << "hour " << rec.hour << ":";
    for (int i = 0; i < 3; ++i)
      std::cout << "  " << topo.name(i) << " served " << rec.served[i] << "/"
                << rec.actual[i];
    std::cout << "\n";
  }
  const std::int64_t bound = hindsight_optimum(topo, actual, inst.mobile_initial,
                                               inst.fixed_batteries, 1, 3);
  std::cout << "realized lost: " << trace.total_lost << " (hindsight bound " << bound
            << ")\n";
  return 0;
}
