#include "stressgraph/learn.hpp"

#include <Eigen/SparseCore>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include <json.hpp>

#include "stressgraph/random.hpp"

namespace stressgraph {

namespace {

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t pair_key(NodeId u, NodeId v, NodeId n) {
  if (u > v) std::swap(u, v);
  return static_cast<std::uint64_t>(u) * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(v);
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

std::int32_t num_classes(std::span<const std::int32_t> labels) {
  std::int32_t c = 0;
  for (auto y : labels) {
    if (y < 0) throw std::invalid_argument("labels must be non-negative");
    c = std::max(c, y + 1);
  }
  return c;
}

Matrix gather_rows(const Matrix& x, std::span<const NodeId> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = x.row(rows[r]);
  return out;
}

double accuracy(const Matrix& logits, std::span<const std::int32_t> labels, std::span<const NodeId> rows,
                bool rows_are_local) {
  if (rows.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Eigen::Index at = rows_are_local ? static_cast<Eigen::Index>(r) : rows[r];
    Eigen::Index best = 0;
    logits.row(at).maxCoeff(&best);
    if (best == labels[static_cast<std::size_t>(rows[r])]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(rows.size());
}

/// Row-wise softmax in place; returns the mean negative log-likelihood of the labels.
double softmax_nll(Matrix& logits, std::span<const std::int32_t> labels, std::span<const NodeId> rows) {
  double nll = 0.0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double peak = logits.row(r).maxCoeff();
    logits.row(r).array() -= peak;
    const double log_z = std::log(logits.row(r).array().exp().sum());
    nll -= logits(r, labels[static_cast<std::size_t>(rows[static_cast<std::size_t>(r)])]) - log_z;
    logits.row(r) = (logits.row(r).array() - log_z).exp().matrix();
  }
  return nll / static_cast<double>(logits.rows());
}

void check_split(const NodeSplit& split, std::span<const std::int32_t> labels, NodeId n) {
  if (static_cast<NodeId>(labels.size()) != n) throw std::invalid_argument("labels must cover every node");
  if (split.train.empty()) throw std::invalid_argument("empty training set");
  for (const auto* part : {&split.train, &split.val, &split.test}) {
    for (NodeId v : *part) {
      if (v < 0 || v >= n) throw std::out_of_range("split node id out of range");
    }
  }
  const auto first = labels[static_cast<std::size_t>(split.train.front())];
  const bool single = std::all_of(split.train.begin(), split.train.end(),
                                  [&](NodeId v) { return labels[static_cast<std::size_t>(v)] == first; });
  if (single) throw std::invalid_argument("training set holds a single class");
}

void check_finite(double loss, int epoch, double lr) {
  if (!std::isfinite(loss)) {
    throw std::runtime_error("loss became non-finite at epoch " + std::to_string(epoch) + " with lr " +
                             std::to_string(lr) + "; lower the learning rate");
  }
}

// Keeps the best-validation epoch and counts epochs since.
struct EarlyStop {
  int patience;
  double best = -1.0;
  int since = 0;
  bool improved(double val) {
    if (val > best) {
      best = val;
      since = 0;
      return true;
    }
    ++since;
    return false;
  }
  bool exhausted() const { return since > patience; }
};

void glorot(Matrix& w, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-limit, limit);
}

}  // namespace

NodeSplit planetoid_split(std::span<const std::int32_t> labels, std::int32_t per_class, std::int32_t num_val,
                          std::int32_t num_test, std::uint64_t seed) {
  const auto n = static_cast<NodeId>(labels.size());
  const auto classes = num_classes(labels);
  std::vector<NodeId> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<NodeId>(order));

  NodeSplit out;
  std::vector<std::int32_t> taken(static_cast<std::size_t>(classes), 0);
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  for (NodeId v : order) {
    auto& t = taken[static_cast<std::size_t>(labels[static_cast<std::size_t>(v)])];
    if (t < per_class) {
      ++t;
      out.train.push_back(v);
      used[static_cast<std::size_t>(v)] = 1;
    }
  }
  for (NodeId v : order) {
    if (used[static_cast<std::size_t>(v)]) continue;
    if (static_cast<std::int32_t>(out.val.size()) < num_val) {
      out.val.push_back(v);
    } else if (static_cast<std::int32_t>(out.test.size()) < num_test) {
      out.test.push_back(v);
    }
  }
  if (static_cast<std::int32_t>(out.test.size()) < num_test) {
    throw std::invalid_argument("not enough nodes for the requested validation and test sizes");
  }
  return out;
}

LinkSplit split_links(const Graph& g, double val_frac, double test_frac, std::uint64_t seed) {
  auto edges = g.edge_list();
  if (edges.size() < 10) throw std::invalid_argument("link splits need at least 10 edges");
  if (!(val_frac >= 0.0 && test_frac >= 0.0 && val_frac + test_frac < 1.0)) {
    throw std::invalid_argument("validation and test fractions must be non-negative and sum below 1");
  }
  const NodeId n = g.num_nodes();
  const auto total = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  if (total - static_cast<double>(edges.size()) < static_cast<double>(edges.size())) {
    throw std::domain_error("graph too dense: fewer non-edges than edges to sample as negatives");
  }
  Rng rng(seed);
  rng.shuffle(std::span<Edge>(edges));
  const auto e = static_cast<double>(edges.size());
  const auto n_val = static_cast<std::size_t>(std::llround(val_frac * e));
  const auto n_test = static_cast<std::size_t>(std::llround(test_frac * e));

  LinkSplit out;
  out.val_pos.assign(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(n_val));
  out.test_pos.assign(edges.begin() + static_cast<std::ptrdiff_t>(n_val),
                      edges.begin() + static_cast<std::ptrdiff_t>(n_val + n_test));
  out.train_pos.assign(edges.begin() + static_cast<std::ptrdiff_t>(n_val + n_test), edges.end());

  // Rejection sampling of distinct non-edges; the density check above keeps
  // the acceptance rate at one half or better.
  std::unordered_set<std::uint64_t> seen;
  auto draw = [&](std::size_t count, std::vector<Edge>& into) {
    while (into.size() < count) {
      auto u = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(n)));
      auto v = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(n)));
      if (u == v || g.has_edge(u, v)) continue;
      if (!seen.insert(pair_key(u, v, n)).second) continue;
      into.push_back({std::min(u, v), std::max(u, v)});
    }
  };
  draw(out.train_pos.size(), out.train_neg);
  draw(out.val_pos.size(), out.val_neg);
  draw(out.test_pos.size(), out.test_neg);
  out.train_graph = Graph::from_edges(n, out.train_pos);
  return out;
}

PairSplit split_pairs(std::span<const std::int32_t> community, std::uint64_t seed, double pairs_per_node) {
  const auto n = static_cast<NodeId>(community.size());
  const auto classes = num_classes(community);
  std::vector<std::vector<NodeId>> members(static_cast<std::size_t>(classes));
  for (NodeId v = 0; v < n; ++v) members[static_cast<std::size_t>(community[static_cast<std::size_t>(v)])].push_back(v);
  std::vector<NodeId> in_shared;  // nodes whose community has a partner
  double available_pos = 0.0;
  double available_neg = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  for (const auto& m : members) {
    const auto s = static_cast<double>(m.size());
    available_pos += s * (s - 1.0) / 2.0;
    if (m.size() > 1) in_shared.insert(in_shared.end(), m.begin(), m.end());
  }
  available_neg -= available_pos;
  const auto half = static_cast<std::size_t>(std::llround(pairs_per_node * static_cast<double>(n) / 2.0));
  if (half == 0) throw std::invalid_argument("pair sampling needs at least one pair per class");
  if (available_pos < static_cast<double>(half) || available_neg < static_cast<double>(half)) {
    throw std::domain_error("not enough same-community or cross-community pairs to sample");
  }

  Rng rng(seed);
  std::unordered_set<std::uint64_t> seen;
  std::vector<Edge> pairs;
  std::vector<std::int8_t> labels;
  while (pairs.size() < half) {
    const NodeId u = in_shared[rng.below(in_shared.size())];
    const auto& group = members[static_cast<std::size_t>(community[static_cast<std::size_t>(u)])];
    const NodeId v = group[rng.below(group.size())];
    if (u == v || !seen.insert(pair_key(u, v, n)).second) continue;
    pairs.push_back({std::min(u, v), std::max(u, v)});
    labels.push_back(1);
  }
  while (pairs.size() < 2 * half) {
    const auto u = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(n)));
    const auto v = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(n)));
    if (community[static_cast<std::size_t>(u)] == community[static_cast<std::size_t>(v)]) continue;
    if (!seen.insert(pair_key(u, v, n)).second) continue;
    pairs.push_back({std::min(u, v), std::max(u, v)});
    labels.push_back(0);
  }
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<std::size_t>(order));
  const std::size_t n_train = order.size() * 8 / 10;
  const std::size_t n_val = order.size() / 10;
  PairSplit out;
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto at = order[r];
    auto& into = r < n_train ? out.train : r < n_train + n_val ? out.val : out.test;
    auto& lab = r < n_train ? out.train_label : r < n_train + n_val ? out.val_label : out.test_label;
    into.push_back(pairs[at]);
    lab.push_back(labels[at]);
  }
  return out;
}

double roc_auc(std::span<const double> scores, std::span<const std::int8_t> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos = 0.0;
  double rank_sum = 0.0;
  for (std::size_t lo = 0; lo < order.size();) {
    std::size_t hi = lo;
    while (hi < order.size() && scores[order[hi]] == scores[order[lo]]) ++hi;
    // Ranks lo+1 .. hi share their average.
    const double avg = (static_cast<double>(lo + 1) + static_cast<double>(hi)) / 2.0;
    for (std::size_t t = lo; t < hi; ++t) {
      if (labels[order[t]] != 0) {
        pos += 1.0;
        rank_sum += avg;
      }
    }
    lo = hi;
  }
  const double neg = static_cast<double>(scores.size()) - pos;
  if (pos == 0.0 || neg == 0.0) throw std::invalid_argument("ROC AUC needs both classes");
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

TrainConfig probe_defaults() {
  TrainConfig cfg;
  cfg.lr = 2.0;
  cfg.epochs = 500;
  cfg.patience = 100;
  return cfg;
}

TrainConfig stressgcn_defaults() {
  TrainConfig cfg;
  cfg.lr = 0.05;
  cfg.epochs = 500;
  cfg.patience = 100;
  cfg.k = 16;
  return cfg;
}

TrainConfig link_defaults() {
  TrainConfig cfg;
  cfg.lr = 0.01;
  cfg.weight_decay = 5e-3;
  cfg.epochs = 500;
  cfg.patience = 100;
  cfg.hidden = 64;
  return cfg;
}

double DepthPoint::mean() const { return mean_of(per_run); }
double DepthPoint::std() const { return std_of(per_run); }

std::vector<double> MetricsReport::per_run() const {
  std::vector<double> out;
  for (const auto& r : runs) out.push_back(r.test);
  return out;
}
double MetricsReport::mean() const { return mean_of(per_run()); }
double MetricsReport::std() const { return std_of(per_run()); }

std::string MetricsReport::to_json(bool with_timing) const {
  nlohmann::ordered_json j;
  j["metric"] = metric;
  j["mean"] = mean();
  j["std"] = std();
  j["per_run"] = per_run();
  if (!per_depth.empty()) {
    auto depths = nlohmann::ordered_json::array();
    for (const auto& p : per_depth) {
      nlohmann::ordered_json d;
      d["depth"] = p.depth;
      d["mean"] = p.mean();
      d["std"] = p.std();
      d["per_run"] = p.per_run;
      depths.push_back(std::move(d));
    }
    j["per_depth"] = std::move(depths);
  }
  if (with_timing) j["seconds"] = seconds;
  return j.dump();
}

MetricsReport merge_reports(std::span<const MetricsReport> reports) {
  MetricsReport out;
  for (const auto& r : reports) {
    if (out.metric.empty()) out.metric = r.metric;
    if (r.metric != out.metric) throw std::invalid_argument("cannot merge reports of different metrics");
    out.runs.insert(out.runs.end(), r.runs.begin(), r.runs.end());
    out.seconds += r.seconds;
  }
  return out;
}

MetricsReport train_probe(const Matrix& x, std::span<const std::int32_t> labels, const NodeSplit& split,
                          const TrainConfig& cfg) {
  const auto start = Clock::now();
  check_split(split, labels, static_cast<NodeId>(x.rows()));
  if (!(cfg.lr > 0.0) || cfg.epochs < 1) throw std::invalid_argument("need lr > 0 and at least one epoch");
  const auto classes = num_classes(labels);

  auto normalized = [&](std::span<const NodeId> rows) {
    Matrix out = gather_rows(x, rows);
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      const double s = out.row(i).norm();
      if (s > 0.0) out.row(i) /= s;
    }
    return out;
  };
  const Matrix xtr = normalized(split.train);
  const Matrix xva = normalized(split.val);
  const Matrix xte = normalized(split.test);
  Matrix onehot = Matrix::Zero(xtr.rows(), classes);
  for (std::size_t r = 0; r < split.train.size(); ++r) {
    onehot(static_cast<Eigen::Index>(r), labels[static_cast<std::size_t>(split.train[r])]) = 1.0;
  }

  Matrix w = Matrix::Zero(x.cols(), classes);
  Eigen::RowVectorXd b = Eigen::RowVectorXd::Zero(classes);
  Matrix vw = Matrix::Zero(x.cols(), classes);
  Eigen::RowVectorXd vb = Eigen::RowVectorXd::Zero(classes);
  EarlyStop stop{cfg.patience};
  RunResult run;
  run.seed = cfg.seed;
  Matrix logits;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    logits = (xtr * w).rowwise() + b;
    const double loss = softmax_nll(logits, labels, split.train);
    check_finite(loss, epoch, cfg.lr);
    const Matrix grad = (logits - onehot) / static_cast<double>(xtr.rows());
    vw = cfg.momentum * vw + xtr.transpose() * grad + cfg.weight_decay * w;
    vb = cfg.momentum * vb + grad.colwise().sum();
    w -= cfg.lr * vw;
    b -= cfg.lr * vb;
    run.epochs_run = epoch + 1;

    const Matrix val_logits = (xva * w).rowwise() + b;
    if (stop.improved(accuracy(val_logits, labels, split.val, true))) {
      run.val = stop.best;
      run.best_epoch = epoch;
      run.test = accuracy((xte * w).rowwise() + b, labels, split.test, true);
      run.train = accuracy((xtr * w).rowwise() + b, labels, split.train, true);
    } else if (stop.exhausted()) {
      break;
    }
  }
  MetricsReport out;
  out.metric = "accuracy";
  out.runs.push_back(run);
  out.seconds = seconds_since(start);
  return out;
}

std::string_view to_string(PropagationFamily f) {
  return f == PropagationFamily::kPlain ? "plain" : "initial-residual";
}

PropagationFamily parse_propagation_family(std::string_view name) {
  if (name == "plain") return PropagationFamily::kPlain;
  if (name == "initial-residual") return PropagationFamily::kInitialResidual;
  throw std::invalid_argument("unknown propagation family '" + std::string(name) +
                              "'; expected plain or initial-residual");
}

MetricsReport depth_sweep(const Operator& op, PropagationFamily family, const Matrix& x,
                          std::span<const std::int32_t> labels, std::span<const NodeSplit> splits,
                          std::span<const int> ks, const TrainConfig& cfg, const DepthHook& hook) {
  const auto start = Clock::now();
  if (ks.empty()) throw std::invalid_argument("depth list is empty");
  if (!std::is_sorted(ks.begin(), ks.end()) || ks.front() < 0) {
    throw std::invalid_argument("depths must be non-negative and ascending");
  }
  if (splits.empty()) throw std::invalid_argument("depth sweep needs at least one split");
  if (x.rows() != op.size()) throw std::invalid_argument("features and operator sizes differ");

  MetricsReport out;
  out.metric = "accuracy";
  Matrix cur = x;
  Matrix buffer;
  int depth = 0;
  for (std::size_t at = 0; at < ks.size(); ++at) {
    if (at > 0 && ks[at] == ks[at - 1]) continue;
    for (; depth < ks[at]; ++depth) {
      op.apply(cur, buffer);
      if (family == PropagationFamily::kPlain) {
        const double peak = buffer.cwiseAbs().maxCoeff();
        if (!std::isfinite(peak)) throw std::overflow_error("propagation overflowed");
        if (peak > 0.0) buffer /= peak;
        cur.swap(buffer);
      } else {
        cur = (1.0 - cfg.alpha) * buffer + cfg.alpha * x;
      }
    }
    if (hook) hook(depth, cur);
    DepthPoint point;
    point.depth = depth;
    const bool last = at + 1 == ks.size();
    for (const auto& split : splits) {
      auto report = train_probe(cur, labels, split, cfg);
      point.per_run.push_back(report.runs.front().test);
      if (last) out.runs.push_back(report.runs.front());
    }
    out.per_depth.push_back(std::move(point));
  }
  out.seconds = seconds_since(start);
  return out;
}

StressGcnParams init_stressgcn(Eigen::Index features, int hidden, Eigen::Index classes, std::uint64_t seed) {
  if (features < 1 || hidden < 1 || classes < 1) throw std::invalid_argument("layer sizes must be positive");
  Rng rng(seed);
  StressGcnParams p;
  p.w_in.resize(features, hidden);
  p.w_out.resize(hidden, classes);
  glorot(p.w_in, rng);
  glorot(p.w_out, rng);
  p.b_in = Vector::Zero(hidden);
  p.b_out = Vector::Zero(classes);
  return p;
}

namespace {

template <typename Input>
StressGcnGrad stressgcn_pass(const Operator& op, const Input& x_in, std::span<const std::int32_t> labels,
                             std::span<const NodeId> train, const StressGcnParams& p, double alpha, int k,
                             double weight_decay) {
  const Eigen::Index n = x_in.rows();
  const Matrix pre = (x_in * p.w_in).rowwise() + p.b_in.transpose();
  const Matrix x0 = pre.cwiseMax(0.0);
  Matrix cur = x0;
  Matrix buffer;
  for (int step = 0; step < k; ++step) {
    op.apply(cur, buffer);
    cur = (1.0 - alpha) * buffer + alpha * x0;
  }

  StressGcnGrad out;
  out.logits = (cur * p.w_out).rowwise() + p.b_out.transpose();
  Matrix train_logits = gather_rows(out.logits, train);
  const double nll = softmax_nll(train_logits, labels, train);
  out.loss = nll + 0.5 * weight_decay * (p.w_in.squaredNorm() + p.w_out.squaredNorm());

  // Output gradient, nonzero on the training rows only.
  Matrix g_logits = Matrix::Zero(n, out.logits.cols());
  const double inv = 1.0 / static_cast<double>(train.size());
  for (std::size_t r = 0; r < train.size(); ++r) {
    auto row = g_logits.row(train[r]);
    row += train_logits.row(static_cast<Eigen::Index>(r)) * inv;
    row(labels[static_cast<std::size_t>(train[r])]) -= inv;
  }
  out.grad.w_out = cur.transpose() * g_logits + weight_decay * p.w_out;
  out.grad.b_out = g_logits.colwise().sum().transpose();

  // Adjoint of X <- (1 - alpha) M X + alpha X0.
  Matrix g = g_logits * p.w_out.transpose();
  Matrix g_x0 = Matrix::Zero(n, g.cols());
  for (int step = 0; step < k; ++step) {
    g_x0 += alpha * g;
    op.apply_transpose(g, buffer);
    g = (1.0 - alpha) * buffer;
  }
  g_x0 += g;
  const Matrix g_pre = (pre.array() > 0.0).select(g_x0, 0.0);
  out.grad.w_in = x_in.transpose() * g_pre + weight_decay * p.w_in;
  out.grad.b_in = g_pre.colwise().sum().transpose();
  return out;
}

void check_gcn_inputs(const Operator& op, const Matrix& x_in, std::span<const std::int32_t> labels, double alpha,
                      int k) {
  if (x_in.rows() != op.size()) throw std::invalid_argument("features and operator sizes differ");
  if (static_cast<Eigen::Index>(labels.size()) != x_in.rows()) {
    throw std::invalid_argument("labels must cover every node");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  if (k < 0) throw std::invalid_argument("k must be non-negative");
}

}  // namespace

StressGcnGrad stressgcn_loss_and_grad(const Operator& op, const Matrix& x_in, std::span<const std::int32_t> labels,
                                      std::span<const NodeId> train, const StressGcnParams& params, double alpha,
                                      int k, double weight_decay) {
  check_gcn_inputs(op, x_in, labels, alpha, k);
  if (train.empty()) throw std::invalid_argument("empty training set");
  return stressgcn_pass(op, x_in, labels, train, params, alpha, k, weight_decay);
}

MetricsReport train_stressgcn(const Operator& op, const Matrix& x_in, std::span<const std::int32_t> labels,
                              const NodeSplit& split, const TrainConfig& cfg) {
  const auto start = Clock::now();
  check_gcn_inputs(op, x_in, labels, cfg.alpha, cfg.k);
  check_split(split, labels, static_cast<NodeId>(x_in.rows()));
  if (!(cfg.lr > 0.0) || cfg.epochs < 1) throw std::invalid_argument("need lr > 0 and at least one epoch");

  // Citation features are mostly zeros.
  const SparseRows sparse = x_in.sparseView();
  const bool use_sparse = static_cast<double>(sparse.nonZeros()) < 0.1 * static_cast<double>(x_in.size());

  StressGcnParams p = init_stressgcn(x_in.cols(), cfg.hidden, num_classes(labels), cfg.seed);
  StressGcnParams v{Matrix::Zero(p.w_in.rows(), p.w_in.cols()), Vector::Zero(p.b_in.size()),
                    Matrix::Zero(p.w_out.rows(), p.w_out.cols()), Vector::Zero(p.b_out.size())};
  EarlyStop stop{cfg.patience};
  RunResult run;
  run.seed = cfg.seed;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto pass = use_sparse
                          ? stressgcn_pass(op, sparse, labels, split.train, p, cfg.alpha, cfg.k, cfg.weight_decay)
                          : stressgcn_pass(op, x_in, labels, split.train, p, cfg.alpha, cfg.k, cfg.weight_decay);
    check_finite(pass.loss, epoch, cfg.lr);
    run.epochs_run = epoch + 1;
    // Metrics of the parameters that produced these logits.
    if (stop.improved(accuracy(pass.logits, labels, split.val, false))) {
      run.val = stop.best;
      run.best_epoch = epoch;
      run.test = accuracy(pass.logits, labels, split.test, false);
      run.train = accuracy(pass.logits, labels, split.train, false);
    } else if (stop.exhausted()) {
      break;
    }
    v.w_in = cfg.momentum * v.w_in + pass.grad.w_in;
    v.b_in = cfg.momentum * v.b_in + pass.grad.b_in;
    v.w_out = cfg.momentum * v.w_out + pass.grad.w_out;
    v.b_out = cfg.momentum * v.b_out + pass.grad.b_out;
    p.w_in -= cfg.lr * v.w_in;
    p.b_in -= cfg.lr * v.b_in;
    p.w_out -= cfg.lr * v.w_out;
    p.b_out -= cfg.lr * v.b_out;
  }
  MetricsReport out;
  out.metric = "accuracy";
  out.runs.push_back(run);
  out.seconds = seconds_since(start);
  return out;
}

MetricsReport train_stressgcn(const Graph& g, const Matrix& x_in, std::span<const std::int32_t> labels,
                              const NodeSplit& split, const TrainConfig& cfg) {
  return train_stressgcn(build_operator(g, OperatorVariant::kRenormDAD), x_in, labels, split, cfg);
}

namespace {

struct PairSet {
  std::vector<Edge> pairs;
  std::vector<std::int8_t> labels;
};

PairSet join(const std::vector<Edge>& pos, const std::vector<Edge>& neg) {
  PairSet out;
  out.pairs = pos;
  out.pairs.insert(out.pairs.end(), neg.begin(), neg.end());
  out.labels.assign(pos.size(), 1);
  out.labels.resize(out.pairs.size(), 0);
  return out;
}

Matrix standardize_columns(const Matrix& e) {
  Matrix out = e.rowwise() - e.colwise().mean();
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    const double s = out.col(c).norm() / std::sqrt(static_cast<double>(std::max<Eigen::Index>(1, out.rows())));
    if (s > 1e-12) {
      out.col(c) /= s;
    } else {
      out.col(c).setZero();
    }
  }
  return out;
}

std::vector<double> pair_logits(const Matrix& z, double bias, const std::vector<Edge>& pairs) {
  std::vector<double> out(pairs.size());
  for (std::size_t t = 0; t < pairs.size(); ++t) out[t] = z.row(pairs[t].u).dot(z.row(pairs[t].v)) + bias;
  return out;
}

MetricsReport train_bilinear(const Matrix& embeddings, const PairSet& train, const PairSet& val,
                             const PairSet& test, const TrainConfig& cfg) {
  const auto start = Clock::now();
  if (!(cfg.lr > 0.0) || cfg.epochs < 1) throw std::invalid_argument("need lr > 0 and at least one epoch");
  for (const auto* set : {&train, &val, &test}) {
    const bool has_pos = std::find(set->labels.begin(), set->labels.end(), 1) != set->labels.end();
    const bool has_neg = std::find(set->labels.begin(), set->labels.end(), 0) != set->labels.end();
    if (!has_pos || !has_neg) throw std::invalid_argument("every part needs positive and negative pairs");
    for (const auto& e : set->pairs) {
      if (e.u < 0 || e.v < 0 || e.u >= embeddings.rows() || e.v >= embeddings.rows()) {
        throw std::out_of_range("pair endpoint outside the embedding rows");
      }
    }
  }
  const Matrix e = standardize_columns(embeddings);
  Rng rng(cfg.seed);
  Matrix w(e.cols(), cfg.hidden);
  glorot(w, rng);
  Eigen::RowVectorXd b = Eigen::RowVectorXd::Zero(cfg.hidden);
  double c = 0.0;
  Matrix vw = Matrix::Zero(w.rows(), w.cols());
  Eigen::RowVectorXd vb = Eigen::RowVectorXd::Zero(cfg.hidden);
  double vc = 0.0;

  EarlyStop stop{cfg.patience};
  RunResult run;
  run.seed = cfg.seed;
  const double inv = 1.0 / static_cast<double>(train.pairs.size());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const Matrix z = (e * w).rowwise() + b;
    const auto logits = pair_logits(z, c, train.pairs);
    double loss = 0.0;
    Matrix g_z = Matrix::Zero(z.rows(), z.cols());
    double g_c = 0.0;
    for (std::size_t t = 0; t < logits.size(); ++t) {
      const double s = logits[t];
      const double y = train.labels[t];
      // log(1 + e^s) - y s, stable for either sign.
      loss += (s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s))) - y * s;
      const double r = (1.0 / (1.0 + std::exp(-s)) - y) * inv;
      g_z.row(train.pairs[t].u) += r * z.row(train.pairs[t].v);
      g_z.row(train.pairs[t].v) += r * z.row(train.pairs[t].u);
      g_c += r;
    }
    check_finite(loss, epoch, cfg.lr);
    run.epochs_run = epoch + 1;
    if (stop.improved(roc_auc(pair_logits(z, c, val.pairs), val.labels))) {
      run.val = stop.best;
      run.best_epoch = epoch;
      run.test = roc_auc(pair_logits(z, c, test.pairs), test.labels);
      run.train = roc_auc(logits, train.labels);
    } else if (stop.exhausted()) {
      break;
    }
    vw = cfg.momentum * vw + e.transpose() * g_z + cfg.weight_decay * w;
    vb = cfg.momentum * vb + g_z.colwise().sum();
    vc = cfg.momentum * vc + g_c;
    w -= cfg.lr * vw;
    b -= cfg.lr * vb;
    c -= cfg.lr * vc;
  }
  MetricsReport out;
  out.metric = "roc_auc";
  out.runs.push_back(run);
  out.seconds = seconds_since(start);
  return out;
}

}  // namespace

MetricsReport train_link_model(const Matrix& embeddings, const LinkSplit& split, const TrainConfig& cfg) {
  if (split.train_neg.empty() || split.val_neg.empty() || split.test_neg.empty()) {
    throw std::invalid_argument("link split has an empty negative set");
  }
  return train_bilinear(embeddings, join(split.train_pos, split.train_neg), join(split.val_pos, split.val_neg),
                        join(split.test_pos, split.test_neg), cfg);
}

MetricsReport train_link_model(const EmbedFn& embed, const LinkSplit& split, const TrainConfig& cfg) {
  const Graph& g = split.train_graph;
  for (const auto* held : {&split.val_pos, &split.test_pos}) {
    for (const auto& e : *held) {
      if (g.has_edge(e.u, e.v)) {
        throw std::logic_error("held-out edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                               ") leaks into the embedding graph");
      }
    }
  }
  const auto start = Clock::now();
  const Matrix emb = embed(g);
  if (emb.rows() < g.num_nodes()) throw std::invalid_argument("embedding has fewer rows than the graph has nodes");
  auto out = train_link_model(emb, split, cfg);
  out.seconds = seconds_since(start);
  return out;
}

MetricsReport train_pair_model(const Matrix& embeddings, const PairSplit& split, const TrainConfig& cfg) {
  auto as_set = [](const std::vector<Edge>& pairs, const std::vector<std::int8_t>& labels) {
    return PairSet{pairs, labels};
  };
  return train_bilinear(embeddings, as_set(split.train, split.train_label), as_set(split.val, split.val_label),
                        as_set(split.test, split.test_label), cfg);
}

MetricsReport train_pair_model(const Matrix& embeddings, std::span<const std::int32_t> community,
                               const TrainConfig& cfg) {
  if (static_cast<Eigen::Index>(community.size()) != embeddings.rows()) {
    throw std::invalid_argument("community labels must cover every embedding row");
  }
  return train_pair_model(embeddings, split_pairs(community, cfg.seed), cfg);
}

}  // namespace stressgraph
