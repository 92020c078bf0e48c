#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "stressgraph/graph.hpp"
#include "stressgraph/operator.hpp"
#include "stressgraph/pivots.hpp"
#include "stressgraph/types.hpp"

namespace stressgraph {

enum class RepulsiveVariant {
  kExact,      // weight 1 / (d + 1)
  kTruncated,  // same, zero beyond the cutoff
  kAdaptive,   // psi / d, 1 at the pivot itself
};

enum class Combine { kConcat, kProduct, kNone };

enum class PivotAggregate {
  kPerPivot,  // one feature block per pivot, in pivot order
  kSum,       // all pivot messages summed into one block
};

std::string_view to_string(RepulsiveVariant v);
/// Accepts e, f, r.
RepulsiveVariant parse_repulsive_variant(std::string_view name);
std::string_view to_string(Combine c);
/// Accepts concat, product, none.
Combine parse_combine(std::string_view name);
std::string_view to_string(PivotAggregate a);
/// Accepts per-pivot, sum.
PivotAggregate parse_pivot_aggregate(std::string_view name);

struct RepulsiveConfig {
  RepulsiveVariant variant = RepulsiveVariant::kExact;
  Hop cutoff = 2;
  Combine combine = Combine::kNone;
  PivotAggregate aggregate = PivotAggregate::kPerPivot;
};

/// Pivot-to-node weight for one hop distance; zero for truncated or
/// unreachable pairs. psi is only read by kAdaptive.
double repulsive_weight(const RepulsiveConfig& cfg, Hop d, std::int32_t psi);

/**
 * Every node receives the pivots' feature rows, each scaled by its
 * distance-based weight. Per-pivot aggregation gives an n x (m f) matrix,
 * summing gives n x f. The result is then combined with x: concat appends x
 * as a last block, product multiplies every block elementwise by x.
 *
 * kExact and kAdaptive throw std::domain_error on an unreachable pair.
 */
Matrix repulsive_embed(const PivotSet& pivots, const Matrix& x, const RepulsiveConfig& cfg);

/**
 * Truncated variant computed from depth-limited BFS rows, so no full distance
 * table or control regions are needed. cfg.variant must be kTruncated.
 */
Matrix repulsive_embed_truncated(const Graph& g, std::span<const NodeId> pivots, const Matrix& x,
                                 const RepulsiveConfig& cfg);

/// Same aggregation over an explicit distance table (one row per pivot).
/// psi may be empty unless the variant is kAdaptive.
Matrix repulsive_embed(const DistanceTable& dist, std::span<const std::int32_t> psi, const Matrix& x,
                       const RepulsiveConfig& cfg);

/**
 * One block per anchor set: block s of node v is x[closest anchor] / (d + 1),
 * or zero when no anchor of the set is reachable.
 */
Matrix anchor_position_features(const AnchorSets& anchors, const Matrix& x);

enum class PivotWeight { kSum, kMean };

std::string_view to_string(PivotWeight w);
/// Accepts sum, mean.
PivotWeight parse_pivot_weight(std::string_view name);

/**
 * Propagation over a pivot-augmented graph. Each step first sets every pivot
 * row to the sum (or mean) of its region's current rows, then every real node
 * takes M X over the real subgraph plus its pivot's fresh row. Returns
 * (n + m) x f with pivot rows last; for k = 0 these are zero.
 *
 * g_aug must be augment_with_pivots(g, pivots, ...) for the same pivots:
 * virtual ids n .. n+m-1 carry the pivot marker and each real node is linked
 * to exactly its region's virtual node. Anything else throws.
 */
Matrix virtual_pivot_propagate(const Graph& g_aug, OperatorVariant variant, const Matrix& x,
                               const PivotSet& pivots, int k, PivotWeight weight,
                               std::uint64_t seed = 0);

/// Same with a caller-built operator over the real nodes.
Matrix virtual_pivot_propagate(const Graph& g_aug, const Operator& real_op, const Matrix& x,
                               const PivotSet& pivots, int k, PivotWeight weight);

/// Real nodes and real edges of a pivot-augmented graph.
Graph real_subgraph(const Graph& g_aug);

}  // namespace stressgraph
