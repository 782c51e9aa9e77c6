#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "swapsched/detail/text.hpp"

namespace swapsched {

using StationId = int;

/// Undirected station graph. A vertex is a swapping station, an edge is a
/// road link a relocation vehicle can traverse within one planning period.
/// Immutable after construction.
class Topology {
 public:
  Topology() = default;

  /// Builds a topology from station names and undirected edges given as
  /// index pairs. Throws std::invalid_argument on out-of-range indices,
  /// self-loops, or duplicate names. Duplicate edges collapse to one.
  static Topology from_edges(std::vector<std::string> names,
                             const std::vector<std::pair<int, int>>& edges) {
    Topology t;
    t.names_ = std::move(names);
    for (std::size_t i = 0; i < t.names_.size(); ++i) {
      if (t.names_[i].empty())
        throw std::invalid_argument("station name must not be empty");
      for (std::size_t j = i + 1; j < t.names_.size(); ++j)
        if (t.names_[i] == t.names_[j])
          throw std::invalid_argument("duplicate station name '" + t.names_[i] + "'");
    }
    t.adjacency_.assign(t.names_.size(), {});
    const int n = t.station_count();
    for (const auto& [a, b] : edges) {
      if (a < 0 || a >= n || b < 0 || b >= n)
        throw std::invalid_argument("edge endpoint out of range: (" +
                                    std::to_string(a) + "," + std::to_string(b) + ")");
      if (a == b)
        throw std::invalid_argument("self-loop at station " + std::to_string(a));
      t.add_edge_unchecked(a, b);
    }
    for (auto& adj : t.adjacency_) std::sort(adj.begin(), adj.end());
    return t;
  }

  int station_count() const { return static_cast<int>(names_.size()); }

  const std::string& name(StationId i) const { return names_.at(i); }

  const std::vector<std::string>& names() const { return names_; }

  /// Index of the named station; throws if unknown.
  StationId index_of(const std::string& name) const {
    for (int i = 0; i < station_count(); ++i)
      if (names_[i] == name) return i;
    throw std::invalid_argument("unknown station '" + name + "'");
  }

  /// Neighbors of station i in ascending order. Never contains i itself:
  /// staying put is always allowed and is modeled separately.
  const std::vector<StationId>& neighbors(StationId i) const {
    return adjacency_.at(i);
  }

  bool adjacent(StationId a, StationId b) const {
    const auto& adj = adjacency_.at(a);
    return std::binary_search(adj.begin(), adj.end(), b);
  }

  /// Edges in first-appearance order, each stored once with from < to not
  /// guaranteed; orientation matches the input.
  const std::vector<std::pair<StationId, StationId>>& edges() const {
    return edges_;
  }

  bool connected() const {
    const int n = station_count();
    if (n <= 1) return true;
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : adjacency_[u])
        if (!seen[v]) {
          seen[v] = 1;
          ++reached;
          q.push(v);
        }
    }
    return reached == n;
  }

 private:
  void add_edge_unchecked(int a, int b) {
    if (adjacent_slow(a, b)) return;
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
    edges_.emplace_back(a, b);
  }

  bool adjacent_slow(int a, int b) const {
    for (int v : adjacency_[a])
      if (v == b) return true;
    return false;
  }

  std::vector<std::string> names_;
  std::vector<std::vector<StationId>> adjacency_;
  std::vector<std::pair<StationId, StationId>> edges_;
};

/// Parses the line-oriented topology format:
///   - '#' starts a comment, blank lines are skipped
///   - "name" declares an isolated station (or pins its index order)
///   - "name1,name2" declares an undirected edge; unknown names are
///     registered in first-appearance order
/// Throws std::runtime_error with <source>:<line> context on malformed
/// input, self-loops, or re-declaration of a known station. If the result
/// is disconnected and `warn` is non-null, a warning line is written there.
inline Topology parse_topology(std::istream& in, const std::string& source,
                               std::ostream* warn = nullptr) {
  std::vector<std::string> names;
  std::map<std::string, int> index;
  std::vector<std::pair<int, int>> edges;

  const auto intern = [&](std::string_view name) {
    auto it = index.find(std::string(name));
    if (it != index.end()) return it->second;
    names.emplace_back(name);
    const int id = static_cast<int>(names.size()) - 1;
    index.emplace(names.back(), id);
    return id;
  };
  const auto fail = [&](int line, const std::string& msg) -> void {
    throw std::runtime_error(source + ":" + std::to_string(line) + ": " + msg);
  };

  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    const auto fields = detail::split(line, ',');
    if (fields.size() == 1) {
      const std::string_view name = detail::trim(fields[0]);
      if (name.empty()) fail(line_no, "empty station name");
      if (index.count(std::string(name)))
        fail(line_no, "station '" + std::string(name) + "' declared twice");
      intern(name);
    } else if (fields.size() == 2) {
      const std::string_view a = detail::trim(fields[0]);
      const std::string_view b = detail::trim(fields[1]);
      if (a.empty() || b.empty()) fail(line_no, "empty station name in edge");
      if (a == b) fail(line_no, "self-loop at station '" + std::string(a) + "'");
      const int ia = intern(a);  // sequenced: argument order is unspecified
      const int ib = intern(b);
      edges.emplace_back(ia, ib);
    } else {
      fail(line_no, "expected 'name' or 'name1,name2', got '" + std::string(line) + "'");
    }
  }

  Topology topo = Topology::from_edges(std::move(names), edges);
  if (warn && !topo.connected())
    *warn << "warning: " << source
          << ": topology is disconnected; batteries cannot move between components\n";
  return topo;
}

inline Topology load_topology(const std::string& path, std::ostream* warn = nullptr) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open topology file '" + path + "'");
  return parse_topology(in, path, warn);
}

/// Writes a topology in the format parse_topology reads. Station
/// declarations come first in index order so a round trip preserves ids.
inline void save_topology(const Topology& topo, std::ostream& out) {
  out << "# stations: " << topo.station_count()
      << ", edges: " << topo.edges().size() << "\n";
  for (const auto& name : topo.names()) out << name << "\n";
  for (const auto& [a, b] : topo.edges())
    out << topo.name(a) << "," << topo.name(b) << "\n";
}

inline void save_topology(const Topology& topo, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write topology file '" + path + "'");
  save_topology(topo, out);
}

inline std::vector<std::string> default_station_names(int n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (int i = 0; i < n; ++i) names.push_back("S" + std::to_string(i));
  return names;
}

/// Cycle of n >= 3 stations.
inline Topology make_ring(int n) {
  if (n < 3) throw std::invalid_argument("ring topology needs at least 3 stations");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return Topology::from_edges(default_station_names(n), edges);
}

/// Simple path of n >= 1 stations.
inline Topology make_path(int n) {
  if (n < 1) throw std::invalid_argument("path topology needs at least 1 station");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Topology::from_edges(default_station_names(n), edges);
}

}  // namespace swapsched
