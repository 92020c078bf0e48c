#include "stressgraph/operator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "stressgraph/parallel.hpp"
#include "stressgraph/random.hpp"

namespace stressgraph {

std::string_view to_string(OperatorVariant v) {
  switch (v) {
    case OperatorVariant::kCentroid: return "centroid";
    case OperatorVariant::kDA: return "da";
    case OperatorVariant::kDAD: return "dad";
    case OperatorVariant::kRenormDAD: return "renorm-dad";
    case OperatorVariant::kLazyDA: return "lazy-da";
    case OperatorVariant::kRWN: return "rwn";
    case OperatorVariant::kRAN: return "ran";
  }
  return "unknown";
}

OperatorVariant parse_operator_variant(std::string_view name) {
  for (auto v : {OperatorVariant::kCentroid, OperatorVariant::kDA, OperatorVariant::kDAD,
                 OperatorVariant::kRenormDAD, OperatorVariant::kLazyDA, OperatorVariant::kRWN,
                 OperatorVariant::kRAN}) {
    if (to_string(v) == name) return v;
  }
  throw std::invalid_argument("unknown operator variant '" + std::string(name) + "'");
}

Operator::Operator(OperatorVariant variant, std::uint64_t seed, std::vector<std::size_t> offsets,
                   std::vector<NodeId> columns, std::vector<double> values)
    : variant_(variant),
      seed_(seed),
      offsets_(std::move(offsets)),
      columns_(std::move(columns)),
      values_(std::move(values)) {
  if (offsets_.empty() || offsets_.back() != columns_.size() || columns_.size() != values_.size()) {
    throw std::invalid_argument("inconsistent operator storage");
  }
}

double Operator::row_sum(NodeId i) const {
  double s = 0.0;
  for (double v : row_values(i)) s += v;
  return s;
}

double Operator::weight(NodeId i, NodeId j) const {
  const auto cols = row_columns(i);
  const auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return row_values(i)[static_cast<std::size_t>(it - cols.begin())];
}

void Operator::apply(const Matrix& x, Matrix& out) const {
  if (x.rows() != size()) throw std::invalid_argument("operator/matrix row mismatch");
  out.resize(x.rows(), x.cols());
  parallel_for(
      0, static_cast<std::size_t>(size()),
      [&](std::size_t i) {
        const auto cols = row_columns(static_cast<NodeId>(i));
        const auto vals = row_values(static_cast<NodeId>(i));
        auto row = out.row(static_cast<Eigen::Index>(i));
        row.setZero();
        for (std::size_t k = 0; k < cols.size(); ++k) {
          if (vals[k] != 0.0) row.noalias() += vals[k] * x.row(cols[k]);
        }
      },
      256);
}

Matrix Operator::apply(const Matrix& x) const {
  Matrix out;
  apply(x, out);
  return out;
}

void Operator::apply_transpose(const Matrix& x, Matrix& out) const {
  if (x.rows() != size()) throw std::invalid_argument("operator/matrix row mismatch");
  out.setZero(x.rows(), x.cols());
  for (NodeId i = 0; i < size(); ++i) {
    const auto cols = row_columns(i);
    const auto vals = row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (vals[k] != 0.0) out.row(cols[k]).noalias() += vals[k] * x.row(i);
    }
  }
}

Operator Operator::scaled(double factor) const {
  std::vector<double> v = values_;
  for (double& w : v) w *= factor;
  return {variant_, seed_, offsets_, columns_, std::move(v)};
}

Matrix Operator::to_dense() const {
  Matrix m = Matrix::Zero(size(), size());
  for (NodeId i = 0; i < size(); ++i) {
    const auto cols = row_columns(i);
    const auto vals = row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) m(i, cols[k]) = vals[k];
  }
  return m;
}

namespace {

double isolated_self_weight(OperatorVariant v) {
  return (v == OperatorVariant::kDA || v == OperatorVariant::kDAD) ? 2.0 : 1.0;
}

}  // namespace

Operator build_operator(const Graph& g, OperatorVariant variant, std::uint64_t seed,
                        const Matrix* features) {
  const NodeId n = g.num_nodes();
  if (variant == OperatorVariant::kRAN) {
    if (features == nullptr) throw std::invalid_argument("RAN operator requires node features");
    if (features->rows() != n) throw std::invalid_argument("RAN features must have one row per node");
  }

  std::vector<double> degree(static_cast<std::size_t>(n), 0.0);
  for (NodeId i = 0; i < n; ++i) {
    for (double w : g.edge_weights(i)) degree[static_cast<std::size_t>(i)] += w;
  }

  // Pattern: sorted neighbors with the diagonal merged in.
  std::vector<std::size_t> offsets(static_cast<std::size_t>(n) + 1, 0);
  std::vector<NodeId> columns;
  std::vector<double> adjacency;  // A_ij for off-diagonal entries, 0 on the diagonal
  columns.reserve(g.neighbor_array().size() + static_cast<std::size_t>(n));
  adjacency.reserve(columns.capacity());
  for (NodeId i = 0; i < n; ++i) {
    const auto nb = g.neighbors(i);
    const auto w = g.edge_weights(i);
    bool placed_self = false;
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (!placed_self && nb[k] > i) {
        columns.push_back(i);
        adjacency.push_back(0.0);
        placed_self = true;
      }
      columns.push_back(nb[k]);
      adjacency.push_back(w[k]);
    }
    if (!placed_self) {
      columns.push_back(i);
      adjacency.push_back(0.0);
    }
    offsets[static_cast<std::size_t>(i) + 1] = columns.size();
  }

  std::vector<double> values(columns.size(), 0.0);
  Rng rng(seed);
  Vector attention;
  if (variant == OperatorVariant::kRAN) {
    attention.resize(features->cols());
    for (Eigen::Index c = 0; c < attention.size(); ++c) attention[c] = rng.normal();
    const double norm = attention.norm();
    if (norm > 0.0) attention /= norm;
  }
  Vector feature_score;
  if (variant == OperatorVariant::kRAN) feature_score = (*features) * attention;

  for (NodeId i = 0; i < n; ++i) {
    const auto lo = offsets[static_cast<std::size_t>(i)];
    const auto hi = offsets[static_cast<std::size_t>(i) + 1];
    const double di = degree[static_cast<std::size_t>(i)];
    const bool isolated = di <= 0.0;
    for (auto k = lo; k < hi; ++k) {
      const NodeId j = columns[k];
      const bool self = j == i;
      const double a = adjacency[k];
      const double dj = degree[static_cast<std::size_t>(j)];
      double& out = values[k];
      if (isolated && variant != OperatorVariant::kRWN) {
        out = self ? isolated_self_weight(variant) : 0.0;
        continue;
      }
      switch (variant) {
        case OperatorVariant::kCentroid: out = self ? 0.0 : a / di; break;
        case OperatorVariant::kDA: out = self ? 1.0 : a / di; break;
        case OperatorVariant::kLazyDA: out = self ? 0.5 : 0.5 * a / di; break;
        case OperatorVariant::kDAD: out = self ? 1.0 : a / std::sqrt(di * dj); break;
        case OperatorVariant::kRenormDAD:
          out = (self ? 1.0 : a) / std::sqrt((di + 1.0) * (dj + 1.0));
          break;
        case OperatorVariant::kRWN: out = std::abs(rng.normal()); break;
        case OperatorVariant::kRAN: out = self ? 0.0 : std::abs(feature_score[j]); break;
      }
    }
    if (variant == OperatorVariant::kRWN) {
      double sq = 0.0;
      for (auto k = lo; k < hi; ++k) sq += values[k] * values[k];
      const double norm = std::sqrt(sq);
      for (auto k = lo; k < hi; ++k) values[k] = norm > 0.0 ? values[k] / norm : 0.0;
      if (norm == 0.0) {
        for (auto k = lo; k < hi; ++k) values[k] = columns[k] == i ? 1.0 : 0.0;
      }
    } else if (variant == OperatorVariant::kRAN && !isolated) {
      double total = 0.0;
      std::size_t count = 0;
      for (auto k = lo; k < hi; ++k) {
        if (columns[k] != i) {
          total += values[k];
          ++count;
        }
      }
      for (auto k = lo; k < hi; ++k) {
        if (columns[k] == i) {
          values[k] = 1.0;
        } else {
          // All-zero scores fall back to uniform neighbor weights.
          values[k] = total > 0.0 ? values[k] / total : 1.0 / static_cast<double>(count);
        }
      }
    }
  }
  return {variant, seed, std::move(offsets), std::move(columns), std::move(values)};
}

}  // namespace stressgraph
