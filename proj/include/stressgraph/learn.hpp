#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "stressgraph/graph.hpp"
#include "stressgraph/operator.hpp"
#include "stressgraph/types.hpp"

namespace stressgraph {

struct NodeSplit {
  std::vector<NodeId> train, val, test;
};

/**
 * Shuffles the nodes with the seed, takes the first per_class nodes of every
 * class for training, then the next num_val and num_test remaining nodes.
 * Labels must lie in [0, C).
 */
NodeSplit planetoid_split(std::span<const std::int32_t> labels, std::int32_t per_class, std::int32_t num_val,
                          std::int32_t num_test, std::uint64_t seed);

struct LinkSplit {
  std::vector<Edge> train_pos, val_pos, test_pos;
  std::vector<Edge> train_neg, val_neg, test_neg;
  Graph train_graph;  // real nodes, training positives only
};

/**
 * Positive edges are shuffled and cut into val and test parts of
 * round(frac * |E|) each, the rest is training. Each part gets as many
 * negatives, drawn uniformly from non-edges without repetition across parts.
 * Throws std::invalid_argument below 10 edges and std::domain_error when the
 * graph has too few non-edges.
 */
LinkSplit split_links(const Graph& g, double val_frac, double test_frac, std::uint64_t seed);

struct PairSplit {
  std::vector<Edge> train, val, test;
  std::vector<std::int8_t> train_label, val_label, test_label;  // 1 = same community
};

/**
 * Draws pairs_per_node * n distinct unordered pairs, half within a community
 * and half across, and cuts them 80/10/10 after shuffling. Communities of
 * size 1 contribute no positive pairs.
 */
PairSplit split_pairs(std::span<const std::int32_t> community, std::uint64_t seed, double pairs_per_node = 10.0);

/// Rank-based ROC AUC with average ranks for ties. Throws when a class is absent.
double roc_auc(std::span<const double> scores, std::span<const std::int8_t> labels);

struct TrainConfig {
  double lr = 0.01;
  int epochs = 200;
  double weight_decay = 5e-4;
  double momentum = 0.9;
  std::uint64_t seed = 0;
  double alpha = 0.1;
  int k = 0;
  int hidden = 64;
  int patience = 30;  // epochs without validation improvement before stopping
};

/// Defaults tuned for the logistic probe on row-L2-normalized features.
TrainConfig probe_defaults();
/// Defaults for the deep propagation network on citation features.
TrainConfig stressgcn_defaults();
/// Defaults for the bilinear link and pair heads.
TrainConfig link_defaults();

struct RunResult {
  std::uint64_t seed = 0;
  double train = 0.0;  // metric on the training set at the selected epoch
  double val = 0.0;
  double test = 0.0;
  int best_epoch = 0;
  int epochs_run = 0;
};

struct DepthPoint {
  int depth = 0;
  std::vector<double> per_run;  // test metric per split
  double mean() const;
  double std() const;
};

struct MetricsReport {
  std::string metric;  // "accuracy" or "roc_auc"
  std::vector<RunResult> runs;
  std::vector<DepthPoint> per_depth;
  double seconds = 0.0;

  std::vector<double> per_run() const;  // test metric per run
  double mean() const;
  double std() const;  // population standard deviation
  /// {metric, mean, std, per_run, per_depth?, seconds}; timing omitted when asked.
  std::string to_json(bool with_timing = true) const;
};

/// Concatenates the runs of several single-run reports.
MetricsReport merge_reports(std::span<const MetricsReport> reports);

/**
 * Multinomial logistic regression on row-L2-normalized x by full-batch
 * gradient descent with momentum and weight decay (bias not decayed), started
 * from zero. The test accuracy is taken at the epoch with the best
 * validation accuracy. Throws when the training nodes hold a single class.
 */
MetricsReport train_probe(const Matrix& x, std::span<const std::int32_t> labels, const NodeSplit& split,
                          const TrainConfig& cfg);

enum class PropagationFamily {
  kPlain,            // X <- M X, rescaled to unit max-abs every step
  kInitialResidual,  // X <- (1 - alpha) M X + alpha X0
};

std::string_view to_string(PropagationFamily f);
/// Accepts plain, initial-residual.
PropagationFamily parse_propagation_family(std::string_view name);

/// Called with each probed depth and its iterate.
using DepthHook = std::function<void(int, const Matrix&)>;

/**
 * Propagates once and probes the iterate at every requested depth on every
 * split, so no snapshots are stored. per_depth holds the test accuracy per
 * split; runs hold the probes at the deepest depth. ks must be ascending.
 */
MetricsReport depth_sweep(const Operator& op, PropagationFamily family, const Matrix& x,
                          std::span<const std::int32_t> labels, std::span<const NodeSplit> splits,
                          std::span<const int> ks, const TrainConfig& cfg, const DepthHook& hook = {});

struct StressGcnParams {
  Matrix w_in;   // f x h
  Vector b_in;   // h
  Matrix w_out;  // h x C
  Vector b_out;  // C
};

/// Glorot-uniform weights from the seed, zero biases.
StressGcnParams init_stressgcn(Eigen::Index features, int hidden, Eigen::Index classes, std::uint64_t seed);

struct StressGcnGrad {
  double loss = 0.0;  // mean cross-entropy over train nodes plus weight_decay / 2 * |W|^2
  StressGcnParams grad;
  Matrix logits;
};

/**
 * Forward pass X0 = relu(X_in W_in + b_in), k initial-residual steps with op
 * and alpha, logits = X_k W_out + b_out; backward pass by the adjoint
 * recursion (the transposed operator applied to the output gradient, with
 * alpha-weighted contributions accumulated into X0).
 */
StressGcnGrad stressgcn_loss_and_grad(const Operator& op, const Matrix& x_in, std::span<const std::int32_t> labels,
                                      std::span<const NodeId> train, const StressGcnParams& params, double alpha,
                                      int k, double weight_decay);

/**
 * Trains the network above with op defaulting to the renormalized DAD of g.
 * Throws std::runtime_error naming the learning rate when the loss becomes
 * non-finite.
 */
MetricsReport train_stressgcn(const Operator& op, const Matrix& x_in, std::span<const std::int32_t> labels,
                              const NodeSplit& split, const TrainConfig& cfg);
MetricsReport train_stressgcn(const Graph& g, const Matrix& x_in, std::span<const std::int32_t> labels,
                              const NodeSplit& split, const TrainConfig& cfg);

/// Builds node embeddings from a graph; used so link embeddings see only training edges.
using EmbedFn = std::function<Matrix(const Graph&)>;

/**
 * Bilinear link scorer: z = E W + b, score(u, v) = logistic(z_u . z_v + c),
 * trained by binary cross-entropy on the training positives and negatives,
 * AUC on validation and test. Embeddings are taken as given.
 */
MetricsReport train_link_model(const Matrix& embeddings, const LinkSplit& split, const TrainConfig& cfg);
/**
 * Same, but the embeddings are computed by embed from split.train_graph. The
 * graph passed to embed is checked to contain no validation or test positive.
 */
MetricsReport train_link_model(const EmbedFn& embed, const LinkSplit& split, const TrainConfig& cfg);

/// The bilinear head on same-community pairs.
MetricsReport train_pair_model(const Matrix& embeddings, const PairSplit& split, const TrainConfig& cfg);
/// Samples the pairs with split_pairs(community, cfg.seed) first.
MetricsReport train_pair_model(const Matrix& embeddings, std::span<const std::int32_t> community,
                               const TrainConfig& cfg);

}  // namespace stressgraph
