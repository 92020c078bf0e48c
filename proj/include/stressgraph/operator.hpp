#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stressgraph/graph.hpp"
#include "stressgraph/types.hpp"

namespace stressgraph {

enum class OperatorVariant {
  kCentroid,   // D^-1 A
  kDA,         // I + D^-1 A
  kDAD,        // I + D^-1/2 A D^-1/2
  kRenormDAD,  // (D+I)^-1/2 (A+I) (D+I)^-1/2
  kLazyDA,     // (I + D^-1 A) / 2
  kRWN,        // random |N(0,1)| weights, rows L2-normalized
  kRAN,        // random attention over features
};

std::string_view to_string(OperatorVariant v);
/// Accepts the CLI spellings: centroid, da, dad, renorm-dad, lazy-da, rwn, ran.
OperatorVariant parse_operator_variant(std::string_view name);

/**
 * Row-structured propagation matrix over a graph's adjacency pattern plus the
 * diagonal. Row i lists (column, weight) pairs sorted by column; the diagonal
 * entry is always present, possibly with weight zero (kCentroid).
 */
class Operator {
 public:
  Operator() = default;
  Operator(OperatorVariant variant, std::uint64_t seed, std::vector<std::size_t> offsets,
           std::vector<NodeId> columns, std::vector<double> values);

  OperatorVariant variant() const { return variant_; }
  std::uint64_t seed() const { return seed_; }
  NodeId size() const { return static_cast<NodeId>(offsets_.size()) - 1; }

  std::span<const NodeId> row_columns(NodeId i) const {
    return {columns_.data() + offsets_[static_cast<std::size_t>(i)],
            columns_.data() + offsets_[static_cast<std::size_t>(i) + 1]};
  }
  std::span<const double> row_values(NodeId i) const {
    return {values_.data() + offsets_[static_cast<std::size_t>(i)],
            values_.data() + offsets_[static_cast<std::size_t>(i) + 1]};
  }
  double row_sum(NodeId i) const;
  /// Weight at (i, j), zero outside the pattern.
  double weight(NodeId i, NodeId j) const;

  /// out = M x. out must not alias x.
  void apply(const Matrix& x, Matrix& out) const;
  Matrix apply(const Matrix& x) const;
  /// out = M^T x. out must not alias x.
  void apply_transpose(const Matrix& x, Matrix& out) const;

  /// Copy with every weight multiplied by factor.
  Operator scaled(double factor) const;

  Matrix to_dense() const;

 private:
  OperatorVariant variant_ = OperatorVariant::kDA;
  std::uint64_t seed_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> columns_;
  std::vector<double> values_;
};

/**
 * Builds the propagation operator of the given variant.
 *
 * kRAN needs node features: e_ij = |a . x_j| with a standard normal and
 * L2-normalized, row-L1-normalized over neighbors, then a unit self-loop.
 * kRWN draws |N(0,1)| on the adjacency-plus-diagonal pattern and L2-normalizes
 * each row. Isolated nodes get a self-weight only, chosen so the row keeps
 * the variant's dominant eigenvalue (2 for kDA/kDAD, 1 otherwise).
 */
Operator build_operator(const Graph& g, OperatorVariant variant, std::uint64_t seed = 0,
                        const Matrix* features = nullptr);

}  // namespace stressgraph
