#include "stressgraph/graph.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "stressgraph/parallel.hpp"

namespace stressgraph {

namespace {

struct WeightedHalfEdge {
  NodeId from;
  NodeId to;
  std::size_t order;  // position of the originating edge, for first-wins dedup
  double weight;
};

void build(NodeId n, std::span<const Edge> edges, std::span<const double> weights,
            BuildStats* stats, std::vector<std::size_t>& offsets, std::vector<NodeId>& neighbors,
            std::vector<double>& out_weights) {
  if (n < 0) throw std::invalid_argument("node count must be non-negative");
  BuildStats local;
  std::vector<WeightedHalfEdge> half;
  half.reserve(edges.size() * 2);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [u, v] = edges[e];
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw std::out_of_range("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                              ") has an endpoint outside [0, " + std::to_string(n) + ")");
    }
    if (u == v) {
      ++local.self_loops_dropped;
      continue;
    }
    const double w = weights.empty() ? 1.0 : weights[e];
    if (!(w >= 0.0)) throw std::invalid_argument("edge weights must be non-negative");
    half.push_back({u, v, e, w});
    half.push_back({v, u, e, w});
  }
  std::sort(half.begin(), half.end(), [](const auto& a, const auto& b) {
    if (a.from != b.from) return a.from < b.from;
    if (a.to != b.to) return a.to < b.to;
    return a.order < b.order;
  });
  offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  neighbors.clear();
  out_weights.clear();
  std::size_t duplicate_halves = 0;
  for (std::size_t i = 0; i < half.size(); ++i) {
    if (i > 0 && half[i].from == half[i - 1].from && half[i].to == half[i - 1].to) {
      ++duplicate_halves;
      continue;
    }
    neighbors.push_back(half[i].to);
    if (!weights.empty()) out_weights.push_back(half[i].weight);
    ++offsets[static_cast<std::size_t>(half[i].from) + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  local.duplicates_dropped = duplicate_halves / 2;
  if (stats) *stats = local;
}

}  // namespace

Graph Graph::from_edges(NodeId n, std::span<const Edge> edges, BuildStats* stats) {
  Graph g;
  build(n, edges, {}, stats, g.offsets_, g.neighbors_, g.weights_);
  return g;
}

Graph Graph::from_weighted_edges(NodeId n, std::span<const Edge> edges,
                                 std::span<const double> weights, BuildStats* stats) {
  if (weights.size() != edges.size()) {
    throw std::invalid_argument("one weight per edge required");
  }
  Graph g;
  build(n, edges, weights, stats, g.offsets_, g.neighbors_, g.weights_);
  return g;
}

std::vector<double> Graph::edge_weights(NodeId v) const {
  const auto lo = offsets_[static_cast<std::size_t>(v)];
  const auto hi = offsets_[static_cast<std::size_t>(v) + 1];
  if (weights_.empty()) return std::vector<double>(hi - lo, 1.0);
  return {weights_.begin() + static_cast<std::ptrdiff_t>(lo),
          weights_.begin() + static_cast<std::ptrdiff_t>(hi)};
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  if (u < 0 || u >= num_nodes()) return false;
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < num_nodes(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.push_back({u, v});
    }
  }
  return out;
}

Graph Graph::with_pivot_marker(std::vector<NodeId> pivot_nodes) const {
  std::sort(pivot_nodes.begin(), pivot_nodes.end());
  pivot_nodes.erase(std::unique(pivot_nodes.begin(), pivot_nodes.end()), pivot_nodes.end());
  for (NodeId p : pivot_nodes) {
    if (p < 0 || p >= num_nodes()) throw std::out_of_range("pivot marker outside the graph");
  }
  Graph g = *this;
  g.pivot_nodes_ = std::move(pivot_nodes);
  return g;
}

bool Graph::is_pivot(NodeId v) const {
  return std::binary_search(pivot_nodes_.begin(), pivot_nodes_.end(), v);
}

std::vector<std::int32_t> Graph::component_labels(std::int32_t* count) const {
  const auto n = static_cast<std::size_t>(num_nodes());
  std::vector<std::int32_t> label(n, -1);
  std::vector<NodeId> stack;
  std::int32_t next = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] >= 0) continue;
    label[s] = next;
    stack.push_back(static_cast<NodeId>(s));
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : neighbors(u)) {
        if (label[static_cast<std::size_t>(v)] < 0) {
          label[static_cast<std::size_t>(v)] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return label;
}

bool Graph::is_connected() const {
  std::int32_t count = 0;
  component_labels(&count);
  return count <= 1;
}

bool Graph::check_invariants() const {
  const NodeId n = num_nodes();
  if (offsets_.empty() || offsets_.front() != 0 || offsets_.back() != neighbors_.size()) {
    return false;
  }
  if (!weights_.empty() && weights_.size() != neighbors_.size()) return false;
  for (NodeId u = 0; u < n; ++u) {
    const auto nb = neighbors(u);
    const auto w = edge_weights(u);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const NodeId v = nb[k];
      if (v < 0 || v >= n || v == u) return false;
      if (k > 0 && nb[k - 1] >= v) return false;
      const auto back = neighbors(v);
      const auto it = std::lower_bound(back.begin(), back.end(), u);
      if (it == back.end() || *it != u) return false;
      if (w[k] != edge_weights(v)[static_cast<std::size_t>(it - back.begin())]) return false;
    }
  }
  return true;
}

DistanceTable::DistanceTable(std::vector<NodeId> sources, NodeId n)
    : sources_(std::move(sources)),
      n_(n),
      dist_(sources_.size() * static_cast<std::size_t>(n), kUnreachable) {}

bool DistanceTable::all_finite() const {
  return std::none_of(dist_.begin(), dist_.end(), [](Hop h) { return h == kUnreachable; });
}

namespace {

void check_source(const Graph& g, NodeId source) {
  if (source < 0 || source >= g.num_nodes()) {
    throw std::out_of_range("BFS source " + std::to_string(source) + " outside [0, " +
                            std::to_string(g.num_nodes()) + ")");
  }
}

void bfs_into(const Graph& g, NodeId source, Hop max_depth, std::span<Hop> dist) {
  std::fill(dist.begin(), dist.end(), kUnreachable);
  std::vector<NodeId> queue;
  queue.reserve(static_cast<std::size_t>(g.num_nodes()));
  dist[static_cast<std::size_t>(source)] = 0;
  queue.push_back(source);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId u = queue[head];
    const Hop du = dist[static_cast<std::size_t>(u)];
    if (du >= max_depth) continue;
    for (NodeId v : g.neighbors(u)) {
      auto& dv = dist[static_cast<std::size_t>(v)];
      if (dv == kUnreachable) {
        dv = du + 1;
        queue.push_back(v);
      }
    }
  }
}

}  // namespace

std::vector<Hop> bfs_sssp(const Graph& g, NodeId source) {
  return bfs_limited(g, source, kUnreachable);
}

std::vector<Hop> bfs_limited(const Graph& g, NodeId source, Hop max_depth) {
  check_source(g, source);
  if (max_depth < 0) throw std::invalid_argument("max_depth must be non-negative");
  std::vector<Hop> dist(static_cast<std::size_t>(g.num_nodes()));
  bfs_into(g, source, max_depth, dist);
  return dist;
}

DistanceTable distance_rows(const Graph& g, std::span<const NodeId> sources, Hop max_depth) {
  for (NodeId s : sources) check_source(g, s);
  DistanceTable table({sources.begin(), sources.end()}, g.num_nodes());
  parallel_for(
      0, sources.size(), [&](std::size_t i) { bfs_into(g, sources[i], max_depth, table.row(i)); },
      8);
  return table;
}

DistanceTable all_pairs_shortest(const Graph& g, NodeId cap) {
  if (g.num_nodes() > cap) {
    throw std::length_error("all-pairs distances requested for " +
                            std::to_string(g.num_nodes()) + " nodes (cap " +
                            std::to_string(cap) + "); use sparse stress with pivots instead");
  }
  std::vector<NodeId> all(static_cast<std::size_t>(g.num_nodes()));
  std::iota(all.begin(), all.end(), 0);
  return distance_rows(g, all);
}

NearestSource multi_source_bfs(const Graph& g, std::span<const NodeId> sources) {
  const auto n = static_cast<std::size_t>(g.num_nodes());
  NearestSource out{std::vector<Hop>(n, kUnreachable), std::vector<NodeId>(n, -1)};
  std::vector<NodeId> frontier;
  for (NodeId s : sources) {
    check_source(g, s);
    auto& src = out.source[static_cast<std::size_t>(s)];
    if (src < 0 || s < src) src = s;
    if (out.dist[static_cast<std::size_t>(s)] != 0) {
      out.dist[static_cast<std::size_t>(s)] = 0;
      frontier.push_back(s);
    }
  }
  // Level-synchronous: a level is complete before the next one is expanded,
  // so taking the minimum source over all parents settles ties by lowest id.
  std::vector<NodeId> next;
  for (Hop depth = 1; !frontier.empty(); ++depth) {
    next.clear();
    for (NodeId u : frontier) {
      const NodeId su = out.source[static_cast<std::size_t>(u)];
      for (NodeId v : g.neighbors(u)) {
        auto& dv = out.dist[static_cast<std::size_t>(v)];
        auto& sv = out.source[static_cast<std::size_t>(v)];
        if (dv == kUnreachable) {
          dv = depth;
          sv = su;
          next.push_back(v);
        } else if (dv == depth && su < sv) {
          sv = su;
        }
      }
    }
    frontier.swap(next);
  }
  return out;
}

}  // namespace stressgraph
