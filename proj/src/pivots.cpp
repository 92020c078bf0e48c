#include "stressgraph/pivots.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "stressgraph/parallel.hpp"
#include "stressgraph/random.hpp"

namespace stressgraph {

Regions control_regions(const DistanceTable& dist, bool allow_unreachable) {
  const std::size_t m = dist.num_sources();
  const auto n = static_cast<std::size_t>(dist.num_nodes());
  if (m == 0) throw std::invalid_argument("control regions need at least one pivot");
  Regions out;
  out.region.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    Hop best = kUnreachable;
    for (std::size_t p = 0; p < m; ++p) {
      const Hop d = dist.at(p, static_cast<NodeId>(i));
      if (d == kUnreachable) {
        if (!allow_unreachable) {
          throw std::domain_error("node " + std::to_string(i) + " is unreachable from pivot " +
                                  std::to_string(dist.sources()[p]));
        }
        continue;
      }
      if (d < best) {
        best = d;
        out.region[i] = static_cast<std::int32_t>(p);
      }
    }
    if (out.region[i] < 0) {
      throw std::domain_error("node " + std::to_string(i) + " reaches no pivot");
    }
  }

  // Per region, sorted member distances; psi is then a binary search.
  std::vector<std::vector<Hop>> member_dist(m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = static_cast<std::size_t>(out.region[i]);
    member_dist[p].push_back(dist.at(p, static_cast<NodeId>(i)));
  }
  for (auto& v : member_dist) std::sort(v.begin(), v.end());

  out.psi.assign(m * n, 0);
  for (std::size_t p = 0; p < m; ++p) {
    const auto& members = member_dist[p];
    for (std::size_t i = 0; i < n; ++i) {
      const Hop d = dist.at(p, static_cast<NodeId>(i));
      if (d == kUnreachable) continue;
      // d_jp <= d_ip / 2 over integers is d_jp <= floor(d_ip / 2).
      const auto it = std::upper_bound(members.begin(), members.end(), d / 2);
      out.psi[p * n + i] = static_cast<std::int32_t>(it - members.begin());
    }
  }
  return out;
}

std::vector<NodeId> PivotSet::region_members(std::size_t p) const {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < region.size(); ++i) {
    if (region[i] == static_cast<std::int32_t>(p)) out.push_back(static_cast<NodeId>(i));
  }
  return out;
}

PivotSet make_pivot_set(const Graph& g, std::vector<NodeId> pivots, bool allow_unreachable) {
  std::vector<NodeId> sorted = pivots;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("pivots must be distinct");
  }
  for (NodeId p : pivots) {
    if (p < 0 || p >= g.num_nodes()) throw std::out_of_range("pivot id out of range");
  }
  PivotSet out;
  out.dist = distance_rows(g, pivots);
  out.pivots = std::move(pivots);
  auto regions = control_regions(out.dist, allow_unreachable);
  out.region = std::move(regions.region);
  out.psi = std::move(regions.psi);
  return out;
}

PivotSet select_pivots_maxmin(const Graph& g, std::int32_t m, std::uint64_t seed, bool per_component) {
  const NodeId n = g.num_nodes();
  if (m < 1 || m > n) {
    throw std::invalid_argument("pivot count must lie in [1, " + std::to_string(n) + "], got " +
                                std::to_string(m));
  }
  if (!per_component && !g.is_connected()) {
    throw std::domain_error("maxmin pivots on a disconnected graph; enable per-component selection");
  }
  Rng rng(seed);
  std::vector<NodeId> pivots{static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(n)))};
  std::vector<Hop> nearest = bfs_sssp(g, pivots.front());
  while (static_cast<std::int32_t>(pivots.size()) < m) {
    NodeId next = 0;
    for (NodeId v = 1; v < n; ++v) {
      if (nearest[static_cast<std::size_t>(v)] > nearest[static_cast<std::size_t>(next)]) next = v;
    }
    pivots.push_back(next);
    const auto row = bfs_sssp(g, next);
    for (std::size_t v = 0; v < row.size(); ++v) nearest[v] = std::min(nearest[v], row[v]);
  }
  return make_pivot_set(g, std::move(pivots), per_component);
}

std::vector<NodeId> anchor_size_schedule(NodeId n, double c) {
  if (n < 2) throw std::invalid_argument("anchor sets need at least 2 nodes");
  if (!(c > 0.0)) throw std::invalid_argument("anchor repetition factor must be positive");
  const auto levels = static_cast<int>(std::ceil(std::log2(static_cast<double>(n))));
  const auto repeats = static_cast<int>(std::ceil(c * levels));
  std::vector<NodeId> sizes;
  for (int j = 0; j < levels; ++j) {
    const NodeId size = std::max<NodeId>(1, static_cast<NodeId>(n >> (j + 1)));
    for (int r = 0; r < repeats; ++r) sizes.push_back(size);
  }
  return sizes;
}

AnchorSets make_anchor_sets(const Graph& g, std::vector<std::vector<NodeId>> sets) {
  AnchorSets out;
  out.n = g.num_nodes();
  out.sets = std::move(sets);
  const std::size_t t = out.sets.size();
  const auto n = static_cast<std::size_t>(out.n);
  out.closest.assign(n * t, -1);
  out.closest_dist.assign(n * t, kUnreachable);
  parallel_for(
      0, t,
      [&](std::size_t s) {
        auto& set = out.sets[s];
        std::sort(set.begin(), set.end());
        const auto near = multi_source_bfs(g, set);
        for (std::size_t v = 0; v < n; ++v) {
          out.closest[v * t + s] = near.source[v];
          out.closest_dist[v * t + s] = near.dist[v];
        }
      },
      1);
  return out;
}

AnchorSets select_anchor_sets(const Graph& g, double c, std::uint64_t seed) {
  const auto sizes = anchor_size_schedule(g.num_nodes(), c);
  Rng rng(seed);
  std::vector<std::vector<NodeId>> sets;
  sets.reserve(sizes.size());
  for (NodeId size : sizes) sets.push_back(rng.sample_without_replacement(g.num_nodes(), size));
  return make_anchor_sets(g, std::move(sets));
}

Graph augment_with_pivots(const Graph& g, const PivotSet& pivots, VirtualEdgeWeight weight) {
  if (pivots.size() == 0) throw std::invalid_argument("cannot augment with an empty pivot set");
  const NodeId n = g.num_nodes();
  if (pivots.num_nodes() != n || pivots.region.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("pivot set was computed on a different graph");
  }
  const auto m = static_cast<NodeId>(pivots.size());
  std::vector<NodeId> marker;
  for (NodeId k = 0; k < m; ++k) marker.push_back(n + k);

  std::vector<Edge> edges;
  std::vector<double> weights;
  for (NodeId u = 0; u < n; ++u) {
    const auto nb = g.neighbors(u);
    const auto w = g.edge_weights(u);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (u < nb[k]) {
        edges.push_back({u, nb[k]});
        weights.push_back(w[k]);
      }
    }
  }
  std::vector<double> region_size(static_cast<std::size_t>(m), 0.0);
  for (auto r : pivots.region) region_size[static_cast<std::size_t>(r)] += 1.0;
  for (NodeId i = 0; i < n; ++i) {
    const auto r = pivots.region[static_cast<std::size_t>(i)];
    edges.push_back({i, n + r});
    weights.push_back(weight == VirtualEdgeWeight::kMean ? 1.0 / region_size[static_cast<std::size_t>(r)] : 1.0);
  }
  if (weight == VirtualEdgeWeight::kUnit && !g.weighted()) {
    return Graph::from_edges(n + m, edges).with_pivot_marker(std::move(marker));
  }
  return Graph::from_weighted_edges(n + m, edges, weights).with_pivot_marker(std::move(marker));
}

}  // namespace stressgraph
