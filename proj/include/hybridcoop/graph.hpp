// Copyright 2026 The hybridcoop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Interaction topologies: complete graph, von Neumann square lattice and
// Barabasi-Albert preferential attachment, plus degree diagnostics and a
// plain-text edge-list format.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hybridcoop/game.hpp"
#include "hybridcoop/rng.hpp"

namespace hybridcoop {

using NodeId = std::uint32_t;

struct LatticeShape {
  std::size_t rows;
  std::size_t cols;
  bool periodic;
};

/// Simple undirected graph stored as sorted adjacency lists. Immutable once
/// built; construction rejects self-loops, duplicate edges and out-of-range
/// endpoints.
class Graph {
 public:
  Graph(std::size_t node_count, const std::vector<std::pair<NodeId, NodeId>>& edges,
        std::optional<LatticeShape> lattice = std::nullopt)
      : adjacency_(node_count), lattice_(lattice) {
    if (node_count == 0) throw DomainError("graph needs at least one node");
    for (auto [u, v] : edges) {
      if (u >= node_count || v >= node_count) throw DomainError("edge endpoint out of range");
      if (u == v) throw DomainError("self-loops are not allowed");
      adjacency_[u].push_back(v);
      adjacency_[v].push_back(u);
    }
    for (auto& nbrs : adjacency_) {
      std::sort(nbrs.begin(), nbrs.end());
      if (std::adjacent_find(nbrs.begin(), nbrs.end()) != nbrs.end()) {
        throw DomainError("duplicate edges are not allowed");
      }
    }
    edge_count_ = edges.size();
  }

  std::size_t node_count() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const std::vector<NodeId>& neighbors(NodeId i) const { return adjacency_[i]; }
  std::size_t degree(NodeId i) const { return adjacency_[i].size(); }
  const std::optional<LatticeShape>& lattice() const { return lattice_; }

  // (i, j) with i < j, sorted lexicographically.
  std::vector<std::pair<NodeId, NodeId>> edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(edge_count_);
    for (NodeId i = 0; i < adjacency_.size(); ++i) {
      for (NodeId j : adjacency_[i]) {
        if (i < j) out.emplace_back(i, j);
      }
    }
    return out;
  }

  bool operator==(const Graph& other) const { return adjacency_ == other.adjacency_; }

 private:
  std::vector<std::vector<NodeId>> adjacency_;
  std::optional<LatticeShape> lattice_;
  std::size_t edge_count_ = 0;
};

inline Graph complete(std::size_t n) {
  if (n < 2) throw DomainError("complete graph needs n >= 2");
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(n * (n - 1) / 2);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  }
  return Graph(n, edges);
}

/// rows x cols grid with 4-neighbour interactions; node id = r * cols + c.
/// Non-periodic grids give corners degree 2 and edges degree 3. Periodic
/// grids need both sides >= 3, otherwise the wrap-around would duplicate
/// an existing edge.
inline Graph square_lattice(std::size_t rows, std::size_t cols, bool periodic = false) {
  if (rows < 2 || cols < 2) throw DomainError("square lattice needs rows, cols >= 2");
  if (periodic && (rows < 3 || cols < 3)) throw DomainError("periodic lattice needs rows, cols >= 3");
  std::vector<std::pair<NodeId, NodeId>> edges;
  const auto id = [cols](std::size_t r, std::size_t c) { return static_cast<NodeId>(r * cols + c); };
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (c + 1 < cols) {
        edges.emplace_back(id(r, c), id(r, c + 1));
      } else if (periodic) {
        edges.emplace_back(id(r, 0), id(r, c));
      }
      if (r + 1 < rows) {
        edges.emplace_back(id(r, c), id(r + 1, c));
      } else if (periodic) {
        edges.emplace_back(id(0, c), id(r, c));
      }
    }
  }
  return Graph(rows * cols, edges, LatticeShape{rows, cols, periodic});
}

/// Preferential attachment grown from a complete seed of m + 1 nodes. Each
/// new node links to m distinct older nodes drawn with probability
/// proportional to degree.
inline Graph barabasi_albert(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (m < 1) throw DomainError("Barabasi-Albert needs m >= 1");
  if (n <= m) throw DomainError("Barabasi-Albert needs n > m");
  Rng rng(seed);
  const std::size_t seed_nodes = m + 1;
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(seed_nodes * m / 2 + (n - seed_nodes) * m);
  // Node i appears deg(i) times, so a uniform draw is degree-proportional.
  std::vector<NodeId> endpoints;
  endpoints.reserve(2 * edges.capacity());
  for (NodeId i = 0; i < seed_nodes; ++i) {
    for (NodeId j = i + 1; j < seed_nodes; ++j) {
      edges.emplace_back(i, j);
      endpoints.push_back(i);
      endpoints.push_back(j);
    }
  }
  std::vector<NodeId> targets;
  targets.reserve(m);
  for (auto v = static_cast<NodeId>(seed_nodes); v < n; ++v) {
    targets.clear();
    while (targets.size() < m) {
      const NodeId t = endpoints[rng.index(endpoints.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (NodeId t : targets) {
      edges.emplace_back(t, v);
      endpoints.push_back(t);
      endpoints.push_back(v);
    }
  }
  return Graph(n, edges);
}

struct DegreeStats {
  double mean_degree;
  std::size_t max_degree;
  std::map<std::size_t, std::size_t> histogram;  // degree -> node count
  std::optional<double> tail_exponent;           // chi in p_k ~ k^-chi
};

/// Exact degree moments and a least-squares fit of log count against
/// log degree over degrees >= `tail_from` (default: the minimum degree).
/// The exponent is a rough diagnostic; it needs at least three distinct
/// degrees in the fitted range.
inline DegreeStats degree_stats(const Graph& g, std::optional<std::size_t> tail_from = std::nullopt) {
  DegreeStats s{};
  std::size_t total = 0;
  for (NodeId i = 0; i < g.node_count(); ++i) {
    const std::size_t d = g.degree(i);
    ++s.histogram[d];
    total += d;
    s.max_degree = std::max(s.max_degree, d);
  }
  s.mean_degree = static_cast<double>(total) / static_cast<double>(g.node_count());

  const std::size_t kmin = tail_from.value_or(s.histogram.begin()->first);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int points = 0;
  for (auto [d, count] : s.histogram) {
    if (d < kmin || d == 0) continue;
    const double x = std::log(static_cast<double>(d));
    const double y = std::log(static_cast<double>(count));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++points;
  }
  if (points >= 3) {
    const double slope = (points * sxy - sx * sy) / (points * sxx - sx * sx);
    s.tail_exponent = -slope;
  }
  return s;
}

// One "i j" line per edge, i < j, sorted.
inline void write_edge_list(std::ostream& os, const Graph& g) {
  for (auto [i, j] : g.edges()) os << i << ' ' << j << '\n';
}

/// Reads the edge-list format back. Node count is passed explicitly since
/// isolated nodes leave no trace in the file.
inline Graph read_edge_list(std::istream& is, std::size_t node_count) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    long long i = -1, j = -1;
    std::string extra;
    if (!(ls >> i >> j) || (ls >> extra) || i < 0 || j < 0 || i >= j) {
      throw DomainError("malformed edge list at line " + std::to_string(line_no));
    }
    edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
  }
  return Graph(node_count, edges);
}

}  // namespace hybridcoop
