#pragma once

#include <cstdint>
#include <vector>

#include "stressgraph/graph.hpp"

namespace stressgraph {

/// width x height 4-neighbor lattice; node id = row * width + column.
Graph synth_grid(std::int32_t width, std::int32_t height);

struct CommunityGraph {
  Graph graph;
  std::vector<std::int32_t> community;  // clique id per node
};

/**
 * Connected caveman graph: `communities` cliques of `size` nodes arranged in a
 * ring, where each clique gives up one internal edge to link to the previous
 * clique. Afterwards floor(rewire_frac * |E|) distinct edges are rewired: one
 * endpoint is kept and the other moved to a uniform random node. Rewires that
 * would create a self-loop, a duplicate, or disconnect the graph are rejected
 * and resampled, so |E| is preserved and the result is connected.
 */
CommunityGraph synth_caveman(std::int32_t communities, std::int32_t size, double rewire_frac,
                             std::uint64_t seed);

}  // namespace stressgraph
