#include "stressgraph/synth.hpp"

#include <set>
#include <stdexcept>
#include <string>

#include "stressgraph/random.hpp"

namespace stressgraph {

Graph synth_grid(std::int32_t width, std::int32_t height) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("grid dimensions must be at least 1, got " +
                                std::to_string(width) + "x" + std::to_string(height));
  }
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(2 * width * height));
  for (std::int32_t r = 0; r < height; ++r) {
    for (std::int32_t c = 0; c < width; ++c) {
      const NodeId v = r * width + c;
      if (c + 1 < width) edges.push_back({v, v + 1});
      if (r + 1 < height) edges.push_back({v, v + width});
    }
  }
  return Graph::from_edges(width * height, edges);
}

namespace {

using Adjacency = std::vector<std::set<NodeId>>;

bool connected(const Adjacency& adj) {
  if (adj.empty()) return true;
  std::vector<char> seen(adj.size(), 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    for (NodeId v : adj[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  return reached == adj.size();
}

void link(Adjacency& adj, NodeId u, NodeId v) {
  adj[static_cast<std::size_t>(u)].insert(v);
  adj[static_cast<std::size_t>(v)].insert(u);
}

void unlink(Adjacency& adj, NodeId u, NodeId v) {
  adj[static_cast<std::size_t>(u)].erase(v);
  adj[static_cast<std::size_t>(v)].erase(u);
}

}  // namespace

CommunityGraph synth_caveman(std::int32_t communities, std::int32_t size, double rewire_frac,
                             std::uint64_t seed) {
  if (communities < 2 || size < 2) {
    throw std::invalid_argument("caveman graph needs at least 2 communities of size 2");
  }
  if (!(rewire_frac >= 0.0 && rewire_frac < 1.0)) {
    throw std::invalid_argument("rewire fraction must lie in [0, 1)");
  }
  if (size == 2) {
    // Moving the only edge of a 2-clique strands its second node.
    throw std::invalid_argument("connected caveman graph with cliques of size 2 is disconnected");
  }
  const NodeId n = communities * size;
  Adjacency adj(static_cast<std::size_t>(n));
  CommunityGraph out;
  out.community.resize(static_cast<std::size_t>(n));
  for (std::int32_t c = 0; c < communities; ++c) {
    const NodeId start = c * size;
    for (NodeId i = start; i < start + size; ++i) {
      out.community[static_cast<std::size_t>(i)] = c;
      for (NodeId j = i + 1; j < start + size; ++j) link(adj, i, j);
    }
  }
  for (std::int32_t c = 0; c < communities; ++c) {
    const NodeId start = c * size;
    unlink(adj, start, start + 1);
    link(adj, start, (start - 1 + n) % n);
  }

  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v : adj[static_cast<std::size_t>(u)]) {
      if (u < v) edges.push_back({u, v});
    }
  }

  const auto rewires = static_cast<std::int32_t>(rewire_frac * static_cast<double>(edges.size()));
  if (rewires > 0) {
    Rng rng(seed);
    const auto picks = rng.sample_without_replacement(static_cast<std::int32_t>(edges.size()), rewires);
    constexpr int kMaxAttempts = 10000;
    for (std::int32_t pick : picks) {
      Edge& e = edges[static_cast<std::size_t>(pick)];
      bool done = false;
      for (int attempt = 0; attempt < kMaxAttempts && !done; ++attempt) {
        const bool keep_u = rng.below(2) == 0;
        const NodeId kept = keep_u ? e.u : e.v;
        const NodeId dropped = keep_u ? e.v : e.u;
        const auto target = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(n)));
        if (target == kept || adj[static_cast<std::size_t>(kept)].contains(target)) continue;
        unlink(adj, kept, dropped);
        link(adj, kept, target);
        if (connected(adj)) {
          e = {std::min(kept, target), std::max(kept, target)};
          done = true;
        } else {
          unlink(adj, kept, target);
          link(adj, kept, dropped);
        }
      }
      if (!done) throw std::runtime_error("could not rewire an edge without disconnecting the graph");
    }
  }

  out.graph = Graph::from_edges(n, edges);
  return out;
}

}  // namespace stressgraph
