#include "stressgraph/repulse.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "stressgraph/parallel.hpp"

namespace stressgraph {

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view name, const std::pair<E, std::string_view> (&table)[N], const char* what) {
  for (const auto& [value, spelling] : table) {
    if (spelling == name) return value;
  }
  std::string allowed;
  for (const auto& [value, spelling] : table) {
    if (!allowed.empty()) allowed += ", ";
    allowed += spelling;
  }
  throw std::invalid_argument("unknown " + std::string(what) + " '" + std::string(name) + "'; expected one of " +
                              allowed);
}

constexpr std::pair<RepulsiveVariant, std::string_view> kVariants[] = {
    {RepulsiveVariant::kExact, "e"}, {RepulsiveVariant::kTruncated, "f"}, {RepulsiveVariant::kAdaptive, "r"}};
constexpr std::pair<Combine, std::string_view> kCombines[] = {
    {Combine::kConcat, "concat"}, {Combine::kProduct, "product"}, {Combine::kNone, "none"}};
constexpr std::pair<PivotAggregate, std::string_view> kAggregates[] = {{PivotAggregate::kPerPivot, "per-pivot"},
                                                                       {PivotAggregate::kSum, "sum"}};
constexpr std::pair<PivotWeight, std::string_view> kPivotWeights[] = {{PivotWeight::kSum, "sum"},
                                                                      {PivotWeight::kMean, "mean"}};

template <typename E, std::size_t N>
std::string_view name_of(E value, const std::pair<E, std::string_view> (&table)[N]) {
  for (const auto& [v, spelling] : table) {
    if (v == value) return spelling;
  }
  return "?";
}

Matrix combine_with(Matrix agg, const Matrix& x, Combine how) {
  switch (how) {
    case Combine::kNone:
      return agg;
    case Combine::kConcat: {
      Matrix out(agg.rows(), agg.cols() + x.cols());
      out << agg, x;
      return out;
    }
    case Combine::kProduct: {
      const Eigen::Index f = x.cols();
      for (Eigen::Index b = 0; b < agg.cols(); b += f) agg.middleCols(b, f).array() *= x.array();
      return agg;
    }
  }
  return agg;
}

}  // namespace

std::string_view to_string(RepulsiveVariant v) { return name_of(v, kVariants); }
RepulsiveVariant parse_repulsive_variant(std::string_view name) {
  return parse_enum(name, kVariants, "repulsive variant");
}
std::string_view to_string(Combine c) { return name_of(c, kCombines); }
Combine parse_combine(std::string_view name) { return parse_enum(name, kCombines, "combine mode"); }
std::string_view to_string(PivotAggregate a) { return name_of(a, kAggregates); }
PivotAggregate parse_pivot_aggregate(std::string_view name) {
  return parse_enum(name, kAggregates, "pivot aggregation");
}
std::string_view to_string(PivotWeight w) { return name_of(w, kPivotWeights); }
PivotWeight parse_pivot_weight(std::string_view name) { return parse_enum(name, kPivotWeights, "pivot weight"); }

double repulsive_weight(const RepulsiveConfig& cfg, Hop d, std::int32_t psi) {
  switch (cfg.variant) {
    case RepulsiveVariant::kExact:
      if (d == kUnreachable) throw std::domain_error("exact repulsive weights need finite pivot distances");
      return 1.0 / (static_cast<double>(d) + 1.0);
    case RepulsiveVariant::kTruncated:
      if (d == kUnreachable || d > cfg.cutoff) return 0.0;
      return 1.0 / (static_cast<double>(d) + 1.0);
    case RepulsiveVariant::kAdaptive:
      if (d == kUnreachable) throw std::domain_error("adaptive repulsive weights need finite pivot distances");
      if (d == 0) return 1.0;
      return static_cast<double>(psi) / static_cast<double>(d);
  }
  return 0.0;
}

Matrix repulsive_embed(const DistanceTable& dist, std::span<const std::int32_t> psi, const Matrix& x,
                       const RepulsiveConfig& cfg) {
  if (cfg.variant == RepulsiveVariant::kTruncated && cfg.cutoff < 1) {
    throw std::invalid_argument("truncation cutoff must be at least 1");
  }
  const NodeId n = dist.num_nodes();
  const std::size_t m = dist.num_sources();
  if (x.rows() != n) throw std::invalid_argument("feature rows do not match the node count");
  if (m == 0) throw std::invalid_argument("repulsive embedding needs at least one pivot");
  if (cfg.variant == RepulsiveVariant::kAdaptive && psi.size() != m * static_cast<std::size_t>(n)) {
    throw std::invalid_argument("adaptive weights need the pivot control regions");
  }
  const auto pivots = dist.sources();
  const Eigen::Index f = x.cols();
  const bool per_pivot = cfg.aggregate == PivotAggregate::kPerPivot;
  Matrix agg = Matrix::Zero(n, per_pivot ? static_cast<Eigen::Index>(m) * f : f);

  // Checked up front so worker threads never throw.
  if (cfg.variant != RepulsiveVariant::kTruncated) {
    for (std::size_t p = 0; p < m; ++p) {
      for (NodeId i = 0; i < n; ++i) {
        if (dist.at(p, i) == kUnreachable) {
          throw std::domain_error("node " + std::to_string(i) + " is unreachable from pivot " +
                                  std::to_string(pivots[p]) + "; use the truncated variant");
        }
      }
    }
  }
  parallel_for(0, static_cast<std::size_t>(n), [&](std::size_t iu) {
    const auto i = static_cast<NodeId>(iu);
    for (std::size_t p = 0; p < m; ++p) {
      const std::int32_t s = psi.empty() ? 0 : psi[p * static_cast<std::size_t>(n) + iu];
      const double w = repulsive_weight(cfg, dist.at(p, i), s);
      if (w == 0.0) continue;
      const Eigen::Index col = per_pivot ? static_cast<Eigen::Index>(p) * f : 0;
      agg.row(i).segment(col, f) += w * x.row(pivots[p]);
    }
  });
  return combine_with(std::move(agg), x, cfg.combine);
}

Matrix repulsive_embed(const PivotSet& pivots, const Matrix& x, const RepulsiveConfig& cfg) {
  return repulsive_embed(pivots.dist, pivots.psi, x, cfg);
}

Matrix repulsive_embed_truncated(const Graph& g, std::span<const NodeId> pivots, const Matrix& x,
                                 const RepulsiveConfig& cfg) {
  if (cfg.variant != RepulsiveVariant::kTruncated) {
    throw std::invalid_argument("depth-limited distances only serve the truncated variant");
  }
  if (cfg.cutoff < 1) throw std::invalid_argument("truncation cutoff must be at least 1");
  return repulsive_embed(distance_rows(g, pivots, cfg.cutoff), {}, x, cfg);
}

Matrix anchor_position_features(const AnchorSets& anchors, const Matrix& x) {
  if (x.rows() != anchors.n) throw std::invalid_argument("feature rows do not match the anchor tables");
  const std::size_t t = anchors.num_sets();
  const Eigen::Index f = x.cols();
  Matrix out = Matrix::Zero(anchors.n, static_cast<Eigen::Index>(t) * f);
  parallel_for(0, static_cast<std::size_t>(anchors.n), [&](std::size_t vu) {
    const auto v = static_cast<NodeId>(vu);
    for (std::size_t s = 0; s < t; ++s) {
      const Hop d = anchors.dist_at(v, s);
      if (d == kUnreachable) continue;
      out.row(v).segment(static_cast<Eigen::Index>(s) * f, f) =
          x.row(anchors.closest_at(v, s)) / (static_cast<double>(d) + 1.0);
    }
  });
  return out;
}

Graph real_subgraph(const Graph& g_aug) {
  const NodeId n = g_aug.num_real_nodes();
  std::vector<Edge> edges;
  std::vector<double> weights;
  for (NodeId u = 0; u < n; ++u) {
    const auto nb = g_aug.neighbors(u);
    const auto w = g_aug.edge_weights(u);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (nb[k] < n && u < nb[k]) {
        edges.push_back({u, nb[k]});
        weights.push_back(w[k]);
      }
    }
  }
  if (!g_aug.weighted()) return Graph::from_edges(n, edges);
  return Graph::from_weighted_edges(n, edges, weights);
}

namespace {

void check_augmented(const Graph& g_aug, const PivotSet& pivots) {
  const NodeId n = pivots.num_nodes();
  const auto m = static_cast<NodeId>(pivots.size());
  if (g_aug.num_nodes() != n + m || g_aug.num_real_nodes() != n) {
    throw std::invalid_argument("augmented graph has " + std::to_string(g_aug.num_nodes()) + " nodes, expected " +
                                std::to_string(n) + " real plus " + std::to_string(m) + " pivots");
  }
  const auto marked = g_aug.pivot_nodes();
  for (NodeId k = 0; k < m; ++k) {
    if (std::find(marked.begin(), marked.end(), n + k) == marked.end()) {
      throw std::invalid_argument("node " + std::to_string(n + k) + " is not marked as a virtual pivot");
    }
  }
  for (NodeId i = 0; i < n; ++i) {
    const NodeId expected = n + pivots.region[static_cast<std::size_t>(i)];
    int links = 0;
    for (NodeId j : g_aug.neighbors(i)) {
      if (j < n) continue;
      if (j != expected) {
        throw std::invalid_argument("node " + std::to_string(i) + " links to virtual node " + std::to_string(j) +
                                    " outside its control region");
      }
      ++links;
    }
    if (links != 1) {
      throw std::invalid_argument("node " + std::to_string(i) + " is not linked to its region's virtual node");
    }
  }
}

}  // namespace

Matrix virtual_pivot_propagate(const Graph& g_aug, const Operator& real_op, const Matrix& x,
                               const PivotSet& pivots, int k, PivotWeight weight) {
  if (k < 0) throw std::invalid_argument("propagation depth must be non-negative");
  check_augmented(g_aug, pivots);
  const NodeId n = pivots.num_nodes();
  const auto m = static_cast<Eigen::Index>(pivots.size());
  if (x.rows() != n) throw std::invalid_argument("features must cover exactly the real nodes");
  if (real_op.size() != n) throw std::invalid_argument("operator must act on the real nodes");

  std::vector<double> scale(static_cast<std::size_t>(m), 1.0);
  if (weight == PivotWeight::kMean) {
    std::vector<double> count(static_cast<std::size_t>(m), 0.0);
    for (auto r : pivots.region) count[static_cast<std::size_t>(r)] += 1.0;
    for (std::size_t p = 0; p < scale.size(); ++p) scale[p] = 1.0 / count[p];
  }

  Matrix real = x;
  Matrix pivot_rows = Matrix::Zero(m, x.cols());
  Matrix buffer;
  for (int step = 0; step < k; ++step) {
    pivot_rows.setZero();
    for (NodeId i = 0; i < n; ++i) pivot_rows.row(pivots.region[static_cast<std::size_t>(i)]) += real.row(i);
    for (Eigen::Index p = 0; p < m; ++p) pivot_rows.row(p) *= scale[static_cast<std::size_t>(p)];
    real_op.apply(real, buffer);
    for (NodeId i = 0; i < n; ++i) buffer.row(i) += pivot_rows.row(pivots.region[static_cast<std::size_t>(i)]);
    real.swap(buffer);
  }
  Matrix out(n + m, x.cols());
  out << real, pivot_rows;
  return out;
}

Matrix virtual_pivot_propagate(const Graph& g_aug, OperatorVariant variant, const Matrix& x,
                               const PivotSet& pivots, int k, PivotWeight weight, std::uint64_t seed) {
  check_augmented(g_aug, pivots);
  const Graph real = real_subgraph(g_aug);
  const Operator op = build_operator(real, variant, seed, &x);
  return virtual_pivot_propagate(g_aug, op, x, pivots, k, weight);
}

}  // namespace stressgraph
