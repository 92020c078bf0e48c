#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stressgraph/graph.hpp"

namespace stressgraph {

struct Regions {
  std::vector<std::int32_t> region;  // owning pivot index per node
  /// m x n row-major. psi[p * n + i] = |{ j in R(p) : d_jp <= d_ip / 2 }|,
  /// 0 where d_ip is unreachable.
  std::vector<std::int32_t> psi;
};

/**
 * Assigns every node to its nearest pivot (lowest pivot index on ties) and
 * counts the adaptive weights. Throws on any unreachable entry unless
 * allow_unreachable is set, in which case unreachable pairs are skipped and
 * only a node with no reachable pivot at all is an error.
 */
Regions control_regions(const DistanceTable& dist, bool allow_unreachable = false);

struct PivotSet {
  std::vector<NodeId> pivots;
  DistanceTable dist;  // one row per pivot
  std::vector<std::int32_t> region;
  std::vector<std::int32_t> psi;

  std::size_t size() const { return pivots.size(); }
  NodeId num_nodes() const { return dist.num_nodes(); }
  std::int32_t psi_at(std::size_t p, NodeId i) const {
    return psi[p * static_cast<std::size_t>(num_nodes()) + static_cast<std::size_t>(i)];
  }
  /// Node ids in pivot p's region, ascending.
  std::vector<NodeId> region_members(std::size_t p) const;
};

/// Builds a PivotSet around a fixed pivot list.
PivotSet make_pivot_set(const Graph& g, std::vector<NodeId> pivots, bool allow_unreachable = false);

/**
 * Greedy maxmin selection. The first pivot is drawn uniformly from the seed;
 * each later pivot is the node farthest from all chosen ones, lowest id on
 * ties. On a disconnected graph this throws unless per_component is set; then
 * unreachable counts as farthest, so pivots spread over components first.
 */
PivotSet select_pivots_maxmin(const Graph& g, std::int32_t m, std::uint64_t seed,
                              bool per_component = false);

/// Anchor set sizes in sampling order: for j in [0, ceil(log2 n)) the size
/// max(1, floor(n / 2^(j+1))), each repeated ceil(c * ceil(log2 n)) times.
std::vector<NodeId> anchor_size_schedule(NodeId n, double c);

struct AnchorSets {
  NodeId n = 0;
  std::vector<std::vector<NodeId>> sets;  // each sorted ascending
  // n x |sets| row-major: nearest anchor of each set and its hop distance.
  std::vector<NodeId> closest;
  std::vector<Hop> closest_dist;

  std::size_t num_sets() const { return sets.size(); }
  NodeId closest_at(NodeId v, std::size_t s) const {
    return closest[static_cast<std::size_t>(v) * sets.size() + s];
  }
  Hop dist_at(NodeId v, std::size_t s) const {
    return closest_dist[static_cast<std::size_t>(v) * sets.size() + s];
  }
};

AnchorSets select_anchor_sets(const Graph& g, double c, std::uint64_t seed);
/// Closest-anchor tables for caller-chosen sets.
AnchorSets make_anchor_sets(const Graph& g, std::vector<std::vector<NodeId>> sets);

enum class VirtualEdgeWeight {
  kUnit,  // every virtual edge weighs 1
  kMean,  // edges of pivot p weigh 1 / |R(p)|
};

/**
 * Appends one virtual node per pivot (ids n .. n+m-1 in pivot order), linked
 * to every node of that pivot's region. The new nodes carry the pivot marker.
 * With kMean the result is weighted and original edges keep their weights.
 */
Graph augment_with_pivots(const Graph& g, const PivotSet& pivots,
                          VirtualEdgeWeight weight = VirtualEdgeWeight::kUnit);

}  // namespace stressgraph
