#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stressgraph/learn.hpp"
#include "stressgraph/operator.hpp"
#include "stressgraph/repulse.hpp"
#include "stressgraph/types.hpp"

namespace stressgraph {

/// n x d standard normal entries drawn row by row from the seed.
Matrix random_features(NodeId n, int d, std::uint64_t seed);

enum class EmbedKind {
  kRepulsive,  // pivot messages
  kAnchor,     // nearest-anchor messages, one block per anchor set
  kLocal,      // k steps of a neighborhood operator
};

struct EmbedSpec {
  EmbedKind kind = EmbedKind::kRepulsive;
  RepulsiveConfig repulsive;
  std::int32_t pivots = 64;
  double anchor_c = 0.5;
  OperatorVariant local_operator = OperatorVariant::kRenormDAD;
  int local_k = 2;
  std::uint64_t seed = 0;
};

/// Accepts e, f, r, anchor, or local:<operator>[:<k>] such as local:renorm-dad:2.
EmbedSpec parse_embed_spec(const std::string& text);
std::string to_string(const EmbedSpec& spec);

/**
 * Embedding of a graph under constant unit features (or given features when
 * x is non-empty). Pivots are picked by maxmin from spec.seed; on a
 * disconnected graph they are spread over components and the exact variant
 * then weighs unreachable pivots zero, which is the truncated variant with an
 * unbounded cutoff.
 */
Matrix embed_graph(const Graph& g, const EmbedSpec& spec, const Matrix& x = Matrix());

EmbedFn make_embed_fn(const EmbedSpec& spec);

/// "a,b,c", "lo:hi" or "lo:hi:step" (inclusive), or a list ending in "..., hi"
/// that continues the step of the two preceding entries.
std::vector<int> parse_int_list(const std::string& text);

}  // namespace stressgraph
