#pragma once

#include <cstdint>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace swapsched {

/// Directed flow network with node supplies. Supplies must sum to zero;
/// positive means the node injects flow, negative means it absorbs it.
struct FlowNetwork {
  struct Arc {
    int from = 0;
    int to = 0;
    std::int64_t capacity = 0;
    std::int64_t unit_cost = 0;
  };

  static constexpr std::int64_t kUnbounded = std::numeric_limits<std::int64_t>::max();

  int node_count = 0;
  std::vector<Arc> arcs;
  std::vector<std::int64_t> supplies;

  int add_node() {
    supplies.push_back(0);
    return node_count++;
  }

  int add_arc(int from, int to, std::int64_t capacity, std::int64_t unit_cost) {
    if (from < 0 || from >= node_count || to < 0 || to >= node_count)
      throw std::invalid_argument("arc endpoint out of range");
    if (capacity < 0) throw std::invalid_argument("arc capacity must be >= 0");
    arcs.push_back({from, to, capacity, unit_cost});
    return static_cast<int>(arcs.size()) - 1;
  }

  void validate() const {
    if (static_cast<int>(supplies.size()) != node_count)
      throw std::invalid_argument("supplies size does not match node count");
    std::int64_t sum = 0;
    for (std::int64_t s : supplies) sum += s;
    if (sum != 0)
      throw std::invalid_argument("node supplies must sum to zero, got " +
                                  std::to_string(sum));
    for (const Arc& a : arcs) {
      if (a.from < 0 || a.from >= node_count || a.to < 0 || a.to >= node_count)
        throw std::invalid_argument("arc endpoint out of range");
      if (a.capacity < 0) throw std::invalid_argument("arc capacity must be >= 0");
    }
  }
};

struct FlowResult {
  std::vector<std::int64_t> arc_flow;  // parallel to FlowNetwork::arcs
  std::int64_t total_cost = 0;
};

inline std::string to_debug_string(const FlowNetwork& net) {
  std::ostringstream out;
  out << "nodes " << net.node_count << "\n";
  for (int i = 0; i < net.node_count; ++i)
    if (net.supplies[i] != 0) out << "supply " << i << " " << net.supplies[i] << "\n";
  for (const auto& a : net.arcs) {
    out << "arc " << a.from << " -> " << a.to << " cap ";
    if (a.capacity == FlowNetwork::kUnbounded)
      out << "inf";
    else
      out << a.capacity;
    out << " cost " << a.unit_cost << "\n";
  }
  return out.str();
}

namespace detail {

// Successive shortest paths with node potentials. Negative arc costs are
// allowed (the schedule networks rely on them); negative cycles are not and
// raise an error. Residual edges are stored in pairs, partner = index ^ 1.
class MinCostFlowSolver {
 public:
  explicit MinCostFlowSolver(const FlowNetwork& net) : net_(net) {
    net.validate();
    n_ = net.node_count + 2;
    source_ = net.node_count;
    sink_ = net.node_count + 1;
    head_.assign(n_, {});

    for (std::int64_t s : net.supplies)
      if (s > 0) total_supply_ += s;

    for (const auto& a : net.arcs) {
      const std::int64_t cap =
          a.capacity == FlowNetwork::kUnbounded ? total_supply_ : a.capacity;
      add_edge(a.from, a.to, cap, a.unit_cost);
    }
    for (int v = 0; v < net.node_count; ++v) {
      if (net.supplies[v] > 0) add_edge(source_, v, net.supplies[v], 0);
      if (net.supplies[v] < 0) add_edge(v, sink_, -net.supplies[v], 0);
    }
  }

  FlowResult solve() {
    init_potentials();
    std::int64_t routed = 0;
    while (routed < total_supply_) {
      if (!shortest_path()) throw std::runtime_error("infeasible supplies: network cannot route all flow");
      std::int64_t push = total_supply_ - routed;
      for (int v = sink_; v != source_; v = edges_[pred_[v]].from)
        push = std::min(push, edges_[pred_[v]].cap);
      for (int v = sink_; v != source_; v = edges_[pred_[v]].from) {
        edges_[pred_[v]].cap -= push;
        edges_[pred_[v] ^ 1].cap += push;
      }
      routed += push;
    }

    FlowResult result;
    result.arc_flow.resize(net_.arcs.size());
    for (std::size_t i = 0; i < net_.arcs.size(); ++i) {
      const std::int64_t flow = edges_[2 * i + 1].cap;  // reverse edge holds the flow
      result.arc_flow[i] = flow;
      result.total_cost += flow * net_.arcs[i].unit_cost;
    }
    return result;
  }

 private:
  struct Edge {
    int from, to;
    std::int64_t cap, cost;
  };

  void add_edge(int from, int to, std::int64_t cap, std::int64_t cost) {
    head_[from].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({from, to, cap, cost});
    head_[to].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({to, from, 0, -cost});
  }

  // Bellman-Ford from a virtual source connected to every node at distance
  // zero; needed only when some arc cost is negative. Only edges with
  // residual capacity participate. One extra round detects negative cycles.
  void init_potentials() {
    pot_.assign(n_, 0);
    bool has_negative = false;
    for (const auto& e : edges_)
      if (e.cap > 0 && e.cost < 0) has_negative = true;
    if (!has_negative) return;

    for (int round = 0; round < n_; ++round) {
      bool changed = false;
      for (const auto& e : edges_) {
        if (e.cap <= 0) continue;
        if (pot_[e.from] + e.cost < pot_[e.to]) {
          pot_[e.to] = pot_[e.from] + e.cost;
          changed = true;
        }
      }
      if (!changed) return;
      if (round == n_ - 1)
        throw std::runtime_error("network contains a negative-cost cycle");
    }
  }

  bool shortest_path() {
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
    dist_.assign(n_, kInf);
    pred_.assign(n_, -1);
    dist_[source_] = 0;

    using Item = std::pair<std::int64_t, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
    queue.push({0, source_});
    while (!queue.empty()) {
      const auto [d, u] = queue.top();
      queue.pop();
      if (d != dist_[u]) continue;
      for (int idx : head_[u]) {
        const auto& e = edges_[idx];
        if (e.cap <= 0) continue;
        const std::int64_t nd = d + e.cost + pot_[u] - pot_[e.to];
        if (nd < dist_[e.to]) {
          dist_[e.to] = nd;
          pred_[e.to] = idx;
          queue.push({nd, e.to});
        }
      }
    }
    if (dist_[sink_] == kInf) return false;
    for (int v = 0; v < n_; ++v)
      if (dist_[v] != kInf) pot_[v] += dist_[v];
    return true;
  }

  const FlowNetwork& net_;
  int n_ = 0, source_ = 0, sink_ = 0;
  std::int64_t total_supply_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> head_;
  std::vector<std::int64_t> pot_, dist_;
  std::vector<int> pred_;
};

}  // namespace detail

/// Minimum-cost flow routing all supplies. Integral inputs give integral
/// flows. Throws std::runtime_error if the supplies cannot be routed or a
/// negative-cost cycle exists.
inline FlowResult solve_min_cost_flow(const FlowNetwork& net) {
  return detail::MinCostFlowSolver(net).solve();
}

}  // namespace swapsched
