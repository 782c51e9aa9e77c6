#include "swapsched/min_cost_flow.hpp"

#include <gtest/gtest.h>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "support/generators.hpp"

using namespace swapsched;

namespace {

// Exhaustive reference: tries every integral flow assignment arc by arc and
// keeps the cheapest one that balances all nodes. Only usable on tiny
// networks, which is the point — it cannot share a bug with the solver.
std::optional<std::int64_t> enumerate_min_cost(const FlowNetwork& net) {
  std::int64_t total_supply = 0;
  for (std::int64_t s : net.supplies)
    if (s > 0) total_supply += s;

  std::vector<std::int64_t> caps;
  for (const auto& a : net.arcs)
    caps.push_back(a.capacity == FlowNetwork::kUnbounded
                       ? total_supply
                       : std::min(a.capacity, total_supply));

  // Lower bound on the cost still reachable from arc `idx` onward.
  std::vector<std::int64_t> suffix_bound(net.arcs.size() + 1, 0);
  for (int i = static_cast<int>(net.arcs.size()) - 1; i >= 0; --i)
    suffix_bound[i] =
        suffix_bound[i + 1] + std::min<std::int64_t>(0, net.arcs[i].unit_cost * caps[i]);

  std::optional<std::int64_t> best;
  std::vector<std::int64_t> balance(net.node_count, 0);
  std::function<void(std::size_t, std::int64_t)> go = [&](std::size_t idx,
                                                          std::int64_t cost) {
    if (best && cost + suffix_bound[idx] >= *best) return;
    if (idx == net.arcs.size()) {
      for (int v = 0; v < net.node_count; ++v)
        if (balance[v] != net.supplies[v]) return;
      if (!best || cost < *best) best = cost;
      return;
    }
    const auto& a = net.arcs[idx];
    for (std::int64_t f = 0; f <= caps[idx]; ++f) {
      balance[a.from] += f;
      balance[a.to] -= f;
      go(idx + 1, cost + f * a.unit_cost);
      balance[a.from] -= f;
      balance[a.to] += f;
    }
  };
  go(0, 0);
  return best;
}

// Checks that a result is a genuine feasible flow for the network and that
// its reported cost matches the arc flows.
std::string verify_flow(const FlowNetwork& net, const FlowResult& result) {
  if (result.arc_flow.size() != net.arcs.size()) return "arc_flow size mismatch";
  std::vector<std::int64_t> balance(net.node_count, 0);
  std::int64_t cost = 0;
  for (std::size_t i = 0; i < net.arcs.size(); ++i) {
    const auto& a = net.arcs[i];
    const std::int64_t f = result.arc_flow[i];
    if (f < 0) return "negative flow on arc " + std::to_string(i);
    if (a.capacity != FlowNetwork::kUnbounded && f > a.capacity)
      return "flow exceeds capacity on arc " + std::to_string(i);
    balance[a.from] += f;
    balance[a.to] -= f;
    cost += f * a.unit_cost;
  }
  for (int v = 0; v < net.node_count; ++v)
    if (balance[v] != net.supplies[v])
      return "conservation violated at node " + std::to_string(v);
  if (cost != result.total_cost) return "total_cost does not match arc flows";
  return "";
}

FlowNetwork two_node(std::int64_t supply, std::int64_t cap, std::int64_t cost) {
  FlowNetwork net;
  const int a = net.add_node();
  const int b = net.add_node();
  net.supplies[a] = supply;
  net.supplies[b] = -supply;
  net.add_arc(a, b, cap, cost);
  return net;
}

}  // namespace

TEST(MinCostFlow, SingleArc) {
  const FlowNetwork net = two_node(1, 1, 5);
  const FlowResult r = solve_min_cost_flow(net);
  EXPECT_EQ(r.total_cost, 5);
  ASSERT_EQ(r.arc_flow.size(), 1u);
  EXPECT_EQ(r.arc_flow[0], 1);
  EXPECT_EQ(verify_flow(net, r), "");
}

TEST(MinCostFlow, DiamondSplitsAcrossPaths) {
  FlowNetwork net;
  for (int i = 0; i < 4; ++i) net.add_node();
  net.supplies = {2, 0, 0, -2};
  net.add_arc(0, 1, 2, 1);
  net.add_arc(0, 2, 2, 2);
  net.add_arc(1, 3, 1, 0);  // cheap path bottlenecked at 1 unit
  net.add_arc(2, 3, 2, 0);
  const FlowResult r = solve_min_cost_flow(net);
  EXPECT_EQ(r.total_cost, 3);
  EXPECT_EQ(r.arc_flow, (std::vector<std::int64_t>{1, 1, 1, 1}));
}

TEST(MinCostFlow, ParallelArcsCheaperFirst) {
  FlowNetwork net;
  net.add_node();
  net.add_node();
  net.supplies = {2, -2};
  net.add_arc(0, 1, 2, 3);
  net.add_arc(0, 1, 1, 1);
  const FlowResult r = solve_min_cost_flow(net);
  EXPECT_EQ(r.total_cost, 4);
  EXPECT_EQ(r.arc_flow, (std::vector<std::int64_t>{1, 1}));
}

TEST(MinCostFlow, NegativeArcOnPath) {
  FlowNetwork net;
  for (int i = 0; i < 3; ++i) net.add_node();
  net.supplies = {1, 0, -1};
  net.add_arc(0, 1, 1, 4);
  net.add_arc(0, 2, 1, 1);
  net.add_arc(1, 2, 1, -5);
  const FlowResult r = solve_min_cost_flow(net);
  EXPECT_EQ(r.total_cost, -1);  // 0 -> 1 -> 2 beats the direct arc
  EXPECT_EQ(r.arc_flow, (std::vector<std::int64_t>{1, 0, 1}));
}

TEST(MinCostFlow, ZeroSupplyRoutesNothing) {
  FlowNetwork net;
  net.add_node();
  net.add_node();
  net.add_arc(0, 1, 5, -7);  // negative arc alone is not a cycle
  const FlowResult r = solve_min_cost_flow(net);
  EXPECT_EQ(r.total_cost, 0);
  EXPECT_EQ(r.arc_flow, (std::vector<std::int64_t>{0}));
}

TEST(MinCostFlow, SelfLoopCarriesNoFlow) {
  FlowNetwork net = two_node(2, 3, 1);
  net.add_arc(0, 0, 4, 2);
  const FlowResult r = solve_min_cost_flow(net);
  EXPECT_EQ(r.total_cost, 2);
  EXPECT_EQ(r.arc_flow, (std::vector<std::int64_t>{2, 0}));
}

TEST(MinCostFlow, NegativeCycleThrows) {
  FlowNetwork net;
  net.add_node();
  net.add_node();
  net.add_arc(0, 1, 1, -2);
  net.add_arc(1, 0, 1, 1);
  try {
    solve_min_cost_flow(net);
    FAIL() << "expected negative-cycle error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("negative-cost cycle"), std::string::npos);
  }

  FlowNetwork loop;
  loop.add_node();
  loop.add_arc(0, 0, 1, -1);
  EXPECT_THROW(solve_min_cost_flow(loop), std::runtime_error);
}

TEST(MinCostFlow, UnboundedCapacity) {
  const FlowNetwork net = two_node(5, FlowNetwork::kUnbounded, 2);
  const FlowResult r = solve_min_cost_flow(net);
  EXPECT_EQ(r.total_cost, 10);
  EXPECT_EQ(r.arc_flow, (std::vector<std::int64_t>{5}));
}

TEST(MinCostFlow, InfeasibleThrows) {
  FlowNetwork isolated;
  isolated.add_node();
  isolated.add_node();
  isolated.supplies = {1, -1};
  try {
    solve_min_cost_flow(isolated);
    FAIL() << "expected infeasibility error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("infeasible"), std::string::npos);
  }

  FlowNetwork tight = two_node(2, 1, 1);  // capacity bottleneck
  EXPECT_THROW(solve_min_cost_flow(tight), std::runtime_error);
}

TEST(MinCostFlow, ValidationErrors) {
  FlowNetwork net;
  net.add_node();
  net.add_node();
  EXPECT_THROW(net.add_arc(0, 2, 1, 0), std::invalid_argument);
  EXPECT_THROW(net.add_arc(-1, 1, 1, 0), std::invalid_argument);
  EXPECT_THROW(net.add_arc(0, 1, -1, 0), std::invalid_argument);

  net.supplies = {1, 0};  // does not sum to zero
  EXPECT_THROW(net.validate(), std::invalid_argument);
  net.supplies = {1, -1, 0};  // wrong size
  EXPECT_THROW(net.validate(), std::invalid_argument);
}

TEST(MinCostFlow, DebugString) {
  FlowNetwork net = two_node(3, FlowNetwork::kUnbounded, -1);
  const std::string s = to_debug_string(net);
  EXPECT_NE(s.find("supply 0 3"), std::string::npos);
  EXPECT_NE(s.find("cap inf"), std::string::npos);
  EXPECT_NE(s.find("cost -1"), std::string::npos);
}

TEST(MinCostFlow, MatchesEnumerationOnFeasibleNetworks) {
  testsupport::Rng rng(41);
  for (int iter = 0; iter < 150; ++iter) {
    const int n = rng.uniform(3, 5);
    FlowNetwork net;
    for (int i = 0; i < n; ++i) net.add_node();
    const std::int64_t supply = rng.uniform(0, 3);
    net.supplies[0] = supply;
    net.supplies[n - 1] = -supply;
    // A backbone chain keeps every instance feasible; extras add choice.
    for (int i = 0; i + 1 < n; ++i) net.add_arc(i, i + 1, 3, rng.uniform(0, 5));
    const int extras = rng.uniform(0, 4);
    for (int e = 0; e < extras; ++e) {
      const int from = rng.uniform(0, n - 2);
      const int to = rng.uniform(from + 1, n - 1);  // forward arcs only: no cycles
      net.add_arc(from, to, rng.uniform(0, 2), rng.uniform(-3, 5));
    }

    const auto expected = enumerate_min_cost(net);
    ASSERT_TRUE(expected.has_value()) << to_debug_string(net);
    const FlowResult r = solve_min_cost_flow(net);
    EXPECT_EQ(r.total_cost, *expected) << to_debug_string(net);
    EXPECT_EQ(verify_flow(net, r), "") << to_debug_string(net);
  }
}

TEST(MinCostFlow, MatchesEnumerationOnArbitraryNetworks) {
  testsupport::Rng rng(42);
  int feasible = 0;
  for (int iter = 0; iter < 120; ++iter) {
    const int n = rng.uniform(3, 5);
    FlowNetwork net;
    for (int i = 0; i < n; ++i) net.add_node();
    const std::int64_t k1 = rng.uniform(0, 2);
    const std::int64_t k2 = rng.uniform(0, 1);
    net.supplies[0] = k1;
    net.supplies[1] += k2;
    net.supplies[n - 1] -= k1 + k2;
    const int arcs = rng.uniform(3, 7);
    for (int e = 0; e < arcs; ++e) {
      const int from = rng.uniform(0, n - 2);
      const int to = rng.uniform(from + 1, n - 1);
      net.add_arc(from, to, rng.uniform(0, 2), rng.uniform(-3, 5));
    }

    const auto expected = enumerate_min_cost(net);
    if (!expected) {
      EXPECT_THROW(solve_min_cost_flow(net), std::runtime_error) << to_debug_string(net);
      continue;
    }
    ++feasible;
    const FlowResult r = solve_min_cost_flow(net);
    EXPECT_EQ(r.total_cost, *expected) << to_debug_string(net);
    EXPECT_EQ(verify_flow(net, r), "") << to_debug_string(net);
  }
  EXPECT_GE(feasible, 20);  // the comparison must actually exercise solves
}

TEST(MinCostFlow, Deterministic) {
  testsupport::Rng rng(43);
  for (int iter = 0; iter < 20; ++iter) {
    const int n = rng.uniform(4, 6);
    FlowNetwork net;
    for (int i = 0; i < n; ++i) net.add_node();
    const std::int64_t supply = rng.uniform(1, 4);
    net.supplies[0] = supply;
    net.supplies[n - 1] = -supply;
    for (int i = 0; i + 1 < n; ++i) net.add_arc(i, i + 1, 4, rng.uniform(0, 3));
    for (int e = 0; e < 5; ++e) {
      const int from = rng.uniform(0, n - 2);
      const int to = rng.uniform(from + 1, n - 1);
      net.add_arc(from, to, rng.uniform(1, 3), rng.uniform(-2, 4));
    }
    const FlowResult a = solve_min_cost_flow(net);
    const FlowResult b = solve_min_cost_flow(net);
    EXPECT_EQ(a.arc_flow, b.arc_flow);
    EXPECT_EQ(a.total_cost, b.total_cost);
  }
}
