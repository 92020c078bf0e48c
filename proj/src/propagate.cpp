#include "stressgraph/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "stressgraph/parallel.hpp"

namespace stressgraph {

std::vector<int> default_snapshot_depths(int k) {
  std::vector<int> out{0};
  for (int d = 1; d < k; d *= 2) out.push_back(d);
  if (k > 0) out.push_back(k);
  return out;
}

Propagation propagate_linear(const Operator& op, const Matrix& x, int k, bool normalize,
                             std::span<const int> snapshot_depths) {
  if (k < 0) throw std::invalid_argument("propagation depth must be non-negative");
  if (x.rows() != op.size()) throw std::invalid_argument("features and operator sizes differ");
  std::vector<int> wanted(snapshot_depths.begin(), snapshot_depths.end());
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());

  Propagation out;
  out.x = x;
  auto next_snapshot = wanted.begin();
  auto take = [&](int depth) {
    while (next_snapshot != wanted.end() && *next_snapshot < depth) ++next_snapshot;
    if (next_snapshot != wanted.end() && *next_snapshot == depth) {
      out.depths.push_back(depth);
      out.snapshots.push_back(out.x);
      ++next_snapshot;
    }
  };
  take(0);
  Matrix buffer;
  for (int step = 1; step <= k; ++step) {
    op.apply(out.x, buffer);
    out.x.swap(buffer);
    if (normalize) {
      const double peak = out.x.cwiseAbs().maxCoeff();
      if (peak > 0.0) out.x /= peak;
    } else if (!out.x.allFinite()) {
      throw std::overflow_error("propagation overflowed at step " + std::to_string(step) +
                                "; enable per-step normalization");
    }
    take(step);
  }
  return out;
}

Matrix stress_propagate(const Operator& op, const Matrix& x, const PropagationConfig& cfg) {
  if (cfg.z < 0 || cfg.z > cfg.k) throw std::invalid_argument("need 0 <= z <= k");
  if (cfg.beta < 1) throw std::invalid_argument("beta must be a positive integer");
  const Matrix frozen = propagate_linear(op, x, cfg.z, cfg.normalize_each_step).x;
  const NodeId n = op.size();

  // The spacing term only depends on the frozen rows, so it is a fixed offset.
  Matrix offset = Matrix::Zero(frozen.rows(), frozen.cols());
  std::vector<double> row_sum(static_cast<std::size_t>(n), 0.0);
  for (NodeId i = 0; i < n; ++i) {
    const auto cols = op.row_columns(i);
    const auto vals = op.row_values(i);
    double total = 0.0;
    for (std::size_t t = 0; t < cols.size(); ++t) {
      const double m = vals[t];
      if (m == 0.0) continue;
      total += m;
      const NodeId j = cols[t];
      if (j == i) continue;
      const double len = (frozen.row(i) - frozen.row(j)).norm();
      if (len == 0.0) continue;
      // M_ij * d_ij = M_ij^(1 - beta).
      const double scale = std::pow(m, 1 - cfg.beta) / len;
      offset.row(i) += scale * (frozen.row(i) - frozen.row(j));
    }
    if (total == 0.0) throw std::domain_error("operator row " + std::to_string(i) + " sums to zero");
    row_sum[static_cast<std::size_t>(i)] = total;
    offset.row(i) /= total;
  }

  Matrix cur = frozen;
  Matrix buffer;
  for (int step = cfg.z; step < cfg.k; ++step) {
    op.apply(cur, buffer);
    for (NodeId i = 0; i < n; ++i) buffer.row(i) /= row_sum[static_cast<std::size_t>(i)];
    buffer += offset;
    cur.swap(buffer);
  }
  return cur;
}

Matrix simplified_stress_propagate(const Operator& op, const Matrix& x0, const PropagationConfig& cfg) {
  if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  if (cfg.k < 0) throw std::invalid_argument("k must be non-negative");
  if (x0.rows() != op.size()) throw std::invalid_argument("features and operator sizes differ");
  const auto v = op.variant();
  const bool contractive =
      v == OperatorVariant::kLazyDA || v == OperatorVariant::kRenormDAD || v == OperatorVariant::kCentroid;
  if (!contractive && !cfg.allow_divergent) {
    throw std::domain_error("operator '" + std::string(to_string(v)) +
                            "' has dominant eigenvalue above 1 and the recursion diverges; use lazy-da, "
                            "renorm-dad or centroid, or allow it explicitly for small k");
  }
  Matrix cur = x0;
  Matrix buffer;
  const Matrix anchor = cfg.alpha * x0;
  for (int step = 0; step < cfg.k; ++step) {
    op.apply(cur, buffer);
    cur = (1.0 - cfg.alpha) * buffer + anchor;
  }
  return cur;
}

Coefficients iteration_coefficients(double alpha, int k) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  if (k < 0) throw std::invalid_argument("k must be non-negative");
  Coefficients out;
  out.coefficients.resize(static_cast<std::size_t>(k) + 1);
  double decay = 1.0;  // (1 - alpha)^i
  for (int i = 0; i < k; ++i) {
    out.coefficients[static_cast<std::size_t>(i)] = alpha * decay;
    out.partial_sum += alpha * decay;
    decay *= 1.0 - alpha;
  }
  out.coefficients[static_cast<std::size_t>(k)] = decay;
  out.total = out.partial_sum + decay;
  return out;
}

Matrix row_normalize_l1(const Matrix& x) {
  Matrix out = x;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double s = out.row(i).lpNorm<1>();
    if (s > 0.0) out.row(i) /= s;
  }
  return out;
}

Matrix row_normalize_l2(const Matrix& x) {
  Matrix out = x;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double s = out.row(i).norm();
    if (s > 0.0) out.row(i) /= s;
  }
  return out;
}

Indiscernibility indiscernibility(const Matrix& x, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  Indiscernibility out;
  const Eigen::Index n = x.rows();
  if (n == 0) return out;
  const Matrix unit = row_normalize_l2(x);
  const Eigen::VectorXd sq = unit.rowwise().squaredNorm();

  // Nearest-row distances through the Gram matrix, one block of rows at a time.
  const double eps_sq = eps * eps;
  std::vector<char> close(static_cast<std::size_t>(n), 0);
  constexpr Eigen::Index kBlock = 256;
  const std::size_t blocks = static_cast<std::size_t>((n + kBlock - 1) / kBlock);
  parallel_for(
      0, blocks,
      [&](std::size_t b) {
        const Eigen::Index lo = static_cast<Eigen::Index>(b) * kBlock;
        const Eigen::Index rows = std::min(kBlock, n - lo);
        const Eigen::MatrixXd gram = unit.middleRows(lo, rows) * unit.transpose();
        for (Eigen::Index r = 0; r < rows; ++r) {
          const Eigen::Index i = lo + r;
          for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d2 = sq[i] + sq[j] - 2.0 * gram(r, j);
            if (d2 <= eps_sq) {
              close[static_cast<std::size_t>(i)] = 1;
              break;
            }
          }
        }
      },
      1);
  Eigen::Index count = 0;
  for (char c : close) count += c;
  out.node_fraction = static_cast<double>(count) / static_cast<double>(n);

  if (unit.cols() > 0) {
    const Eigen::RowVectorXd spread = unit.colwise().maxCoeff() - unit.colwise().minCoeff();
    out.feature_fraction = static_cast<double>((spread.array() <= eps).count()) / static_cast<double>(unit.cols());
  }
  return out;
}

Matrix dominant_eigenspace(const Graph& g, OperatorVariant variant) {
  std::int32_t count = 0;
  const auto label = g.component_labels(&count);
  const NodeId n = g.num_nodes();
  const bool symmetric = variant == OperatorVariant::kDAD || variant == OperatorVariant::kRenormDAD;
  if (!symmetric && variant != OperatorVariant::kDA && variant != OperatorVariant::kLazyDA &&
      variant != OperatorVariant::kCentroid) {
    throw std::invalid_argument("no closed-form dominant eigenspace for operator '" +
                                std::string(to_string(variant)) + "'");
  }
  Matrix basis = Matrix::Zero(n, count);
  for (NodeId i = 0; i < n; ++i) {
    double weight = 1.0;
    if (symmetric && g.degree(i) > 0) {
      double d = 0.0;
      for (double w : g.edge_weights(i)) d += w;
      weight = std::sqrt(variant == OperatorVariant::kRenormDAD ? d + 1.0 : d);
    }
    basis(i, label[static_cast<std::size_t>(i)]) = weight;
  }
  for (Eigen::Index c = 0; c < basis.cols(); ++c) basis.col(c).normalize();
  return basis;
}

double subspace_alignment(const Matrix& x, const Matrix& basis) {
  const double norm = x.norm();
  if (norm == 0.0) return 0.0;
  const Matrix coeff = basis.transpose() * x;
  return coeff.norm() / norm;
}

}  // namespace stressgraph
