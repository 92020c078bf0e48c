#pragma once

#include <span>
#include <vector>

#include "stressgraph/graph.hpp"
#include "stressgraph/operator.hpp"
#include "stressgraph/types.hpp"

namespace stressgraph {

struct PropagationConfig {
  double alpha = 0.1;  // share of the initial features kept per step
  int k = 0;           // total steps
  int beta = 1;        // target distance exponent, d_ij = M_ij^-beta
  int z = 0;           // depth whose output is frozen as the spacing reference
  bool normalize_each_step = false;
  bool allow_divergent = false;  // permit DA/DAD in the initial-residual recursion
};

struct Propagation {
  Matrix x;
  std::vector<int> depths;  // depths of the snapshots, ascending
  std::vector<Matrix> snapshots;
};

/// 0, 1, 2, 4, ... up to k, plus k itself.
std::vector<int> default_snapshot_depths(int k);

/**
 * Applies op k times. With normalize, the iterate is divided by its largest
 * absolute entry after every step, which only rescales. Without it a
 * non-finite entry raises std::overflow_error. Snapshots are taken at the
 * requested depths (ignored when beyond k).
 */
Propagation propagate_linear(const Operator& op, const Matrix& x, int k, bool normalize,
                             std::span<const int> snapshot_depths = {});

/**
 * Plain propagation to depth cfg.z, then cfg.k - cfg.z spacing-regularized
 * steps: X_i <- sum_j M_ij (X_j + d_ij u_ij) / sum_j M_ij, where u_ij is the
 * unit vector from the frozen depth-z row j to row i (zero when they
 * coincide) and d_ij = M_ij^-beta. Sums run over the operator's row pattern,
 * self entry included; zero-weight entries are skipped.
 */
Matrix stress_propagate(const Operator& op, const Matrix& x, const PropagationConfig& cfg);

/**
 * X <- (1 - alpha) M X + alpha X0 for cfg.k steps. Operators with dominant
 * eigenvalue 2 (DA, DAD) and the random operators are refused unless
 * cfg.allow_divergent is set.
 */
Matrix simplified_stress_propagate(const Operator& op, const Matrix& x0, const PropagationConfig& cfg);

struct Coefficients {
  /// coefficients[i] = alpha (1 - alpha)^i for i < k; coefficients[k] = (1 - alpha)^k.
  std::vector<double> coefficients;
  double partial_sum = 0.0;  // sum over i < k
  double total = 0.0;        // partial_sum plus the depth-k residual
};

Coefficients iteration_coefficients(double alpha, int k);

struct Indiscernibility {
  double node_fraction = 0.0;
  double feature_fraction = 0.0;
};

/**
 * Rows are L2-normalized first (zero rows stay zero). A node counts when its
 * nearest other row lies within eps; a column counts when its spread
 * (max - min) over nodes is at most eps.
 */
Indiscernibility indiscernibility(const Matrix& x, double eps);

Matrix row_normalize_l1(const Matrix& x);
Matrix row_normalize_l2(const Matrix& x);

/**
 * Orthonormal basis of the operator's dominant eigenspace, one column per
 * connected component: the component indicator for the random-walk variants
 * (centroid, DA, lazy DA) and sqrt(degree) restricted to the component for
 * the symmetric ones (DAD uses d_i, renormalized DAD d_i + 1). Isolated
 * nodes use their indicator.
 */
Matrix dominant_eigenspace(const Graph& g, OperatorVariant variant);

/// ||Q Q^T X||_F / ||X||_F for an orthonormal basis Q.
double subspace_alignment(const Matrix& x, const Matrix& basis);

}  // namespace stressgraph
