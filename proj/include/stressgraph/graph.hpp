#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace stressgraph {

using NodeId = std::int32_t;
using Hop = std::int32_t;

/// Hop count meaning "no path". Consumers must test for it explicitly.
inline constexpr Hop kUnreachable = std::numeric_limits<Hop>::max();

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct BuildStats {
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_dropped = 0;
};

/**
 * Immutable undirected graph in CSR form.
 *
 * Every edge is stored in both endpoint rows; neighbor lists are sorted and
 * free of self-loops. Optionally carries per-edge weights (aligned with the
 * neighbor array) and a set of nodes flagged as virtual pivots.
 */
class Graph {
 public:
  Graph() : offsets_{0} {}

  /// Duplicate and reversed edges collapse; self-loops are dropped.
  static Graph from_edges(NodeId n, std::span<const Edge> edges, BuildStats* stats = nullptr);

  /// Same as from_edges; a duplicated edge keeps the weight of its first occurrence.
  static Graph from_weighted_edges(NodeId n, std::span<const Edge> edges,
                                   std::span<const double> weights, BuildStats* stats = nullptr);

  NodeId num_nodes() const { return static_cast<NodeId>(offsets_.size() - 1); }
  std::size_t num_edges() const { return neighbors_.size() / 2; }

  std::span<const std::size_t> offsets() const { return offsets_; }
  std::span<const NodeId> neighbor_array() const { return neighbors_; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {neighbors_.data() + offsets_[static_cast<std::size_t>(v)],
            neighbors_.data() + offsets_[static_cast<std::size_t>(v) + 1]};
  }
  std::size_t degree(NodeId v) const {
    return offsets_[static_cast<std::size_t>(v) + 1] - offsets_[static_cast<std::size_t>(v)];
  }

  bool weighted() const { return !weights_.empty(); }
  /// Weights aligned with neighbors(v); all ones for an unweighted graph.
  std::vector<double> edge_weights(NodeId v) const;

  bool has_edge(NodeId u, NodeId v) const;

  /// Edges with u < v, in CSR order.
  std::vector<Edge> edge_list() const;

  /// Returns a copy with the given nodes flagged as virtual pivots.
  Graph with_pivot_marker(std::vector<NodeId> pivot_nodes) const;
  std::span<const NodeId> pivot_nodes() const { return pivot_nodes_; }
  bool is_pivot(NodeId v) const;
  NodeId num_real_nodes() const {
    return num_nodes() - static_cast<NodeId>(pivot_nodes_.size());
  }

  /// Component label per node, labels numbered by lowest member id.
  std::vector<std::int32_t> component_labels(std::int32_t* count = nullptr) const;
  bool is_connected() const;

  /// Full structural check of the CSR invariants; false on any violation.
  bool check_invariants() const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbors_;
  std::vector<double> weights_;
  std::vector<NodeId> pivot_nodes_;
};

/// |sources| x n table of hop counts, row-major.
class DistanceTable {
 public:
  DistanceTable() = default;
  DistanceTable(std::vector<NodeId> sources, NodeId n);

  std::span<const NodeId> sources() const { return sources_; }
  std::size_t num_sources() const { return sources_.size(); }
  NodeId num_nodes() const { return n_; }

  std::span<const Hop> row(std::size_t s) const {
    return {dist_.data() + s * static_cast<std::size_t>(n_), static_cast<std::size_t>(n_)};
  }
  std::span<Hop> row(std::size_t s) {
    return {dist_.data() + s * static_cast<std::size_t>(n_), static_cast<std::size_t>(n_)};
  }
  Hop at(std::size_t s, NodeId j) const {
    return dist_[s * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)];
  }
  bool all_finite() const;

 private:
  std::vector<NodeId> sources_;
  NodeId n_ = 0;
  std::vector<Hop> dist_;
};

/// Unweighted single-source distances; unreachable nodes get kUnreachable.
std::vector<Hop> bfs_sssp(const Graph& g, NodeId source);

/// BFS that stops expanding at max_depth; anything farther is kUnreachable.
std::vector<Hop> bfs_limited(const Graph& g, NodeId source, Hop max_depth);

/// One BFS row per source. Rows are computed in parallel.
DistanceTable distance_rows(const Graph& g, std::span<const NodeId> sources,
                            Hop max_depth = kUnreachable);

inline constexpr NodeId kDefaultAllPairsCap = 20000;

/// BFS from every node. Throws std::length_error when n exceeds the cap.
DistanceTable all_pairs_shortest(const Graph& g, NodeId cap = kDefaultAllPairsCap);

struct NearestSource {
  std::vector<Hop> dist;
  std::vector<NodeId> source;  // -1 where unreachable
};

/// Multi-source BFS. Among equidistant sources the lowest id wins.
NearestSource multi_source_bfs(const Graph& g, std::span<const NodeId> sources);

}  // namespace stressgraph
