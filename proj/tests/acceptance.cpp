// Prints one PASS/FAIL line per acceptance criterion. Exit status is the
// number of failed criteria. Pass a comma list such as "1,2,11" to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "stressgraph/io.hpp"
#include "stressgraph/layout.hpp"
#include "stressgraph/learn.hpp"
#include "stressgraph/pipelines.hpp"
#include "stressgraph/pivots.hpp"
#include "stressgraph/propagate.hpp"
#include "stressgraph/repulse.hpp"
#include "stressgraph/synth.hpp"

using namespace stressgraph;

namespace {

// Tolerances and budgets, one block per criterion.
namespace tol {
constexpr double kCoeffPartial = 0.9913;
constexpr double kCoeffPartialTol = 0.0005;
constexpr double kCoeffTotalTol = 1e-12;
constexpr double kCoeffSeconds = 0.001;

constexpr double kTraceSlack = 1e-9;
constexpr double kNormalizedStress = 0.05;
constexpr double kFullSeconds = 30.0;

constexpr double kSparseRatio = 2.0;
constexpr double kSparseSeconds = 60.0;

constexpr int kMaxminGraphs = 50;
constexpr NodeId kMaxminMaxNodes = 200;

constexpr double kFixedPointCosine = 0.999;
constexpr double kFixedPointSeconds = 60.0;

constexpr double kStageGain = 0.20;
constexpr double kStageMajorityGap = 0.05;
constexpr double kIndiscernibleDeep = 0.9;
constexpr double kIndiscernibleShallow = 0.05;
constexpr double kIndiscernibleEps = 1e-3;
constexpr double kStageSeconds = 600.0;

constexpr double kResidualFloor = 0.80;
constexpr double kResidualNearBest = 0.015;
constexpr double kPlainDrop = 0.05;
constexpr double kLinearSeconds = 600.0;

constexpr double kGradientError = 1e-4;
constexpr double kDeepFloor = 0.82;
constexpr double kDeepCollapse = 0.01;
constexpr double kDeepSeconds = 900.0;

constexpr double kRepulsiveCom = 0.90;
constexpr double kLocalCeiling = 0.60;
constexpr double kRepulsiveGrid = 0.85;
constexpr double kLinkSeconds = 900.0;

constexpr double kMeanUpdate = 1e-12;
constexpr double kVirtualEnergy = 0.05;
constexpr double kVirtualSeconds = 120.0;

constexpr double kUnrollRelative = 1e-9;
constexpr double kOracleSeconds = 60.0;
}  // namespace tol

constexpr int kCoraSplits = 10;
constexpr int kLinkSeeds = 5;

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(gen);
  return m;
}

const NodeDataset& cora() {
  static const NodeDataset ds = load_node_dataset(std::filesystem::path(STRESSGRAPH_DATA_DIR) / "cora");
  return ds;
}

std::vector<NodeSplit> cora_splits() {
  std::vector<NodeSplit> out;
  for (int s = 0; s < kCoraSplits; ++s) out.push_back(planetoid_split(cora().labels, 20, 500, 1000, s));
  return out;
}

bool non_increasing(const std::vector<double>& trace) {
  for (std::size_t k = 1; k < trace.size(); ++k) {
    if (trace[k] > trace[k - 1] * (1.0 + tol::kTraceSlack)) return false;
  }
  return true;
}

Outcome coefficients() {
  const auto start = Clock::now();
  const auto c = iteration_coefficients(0.1, 45);
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  const bool pass = std::abs(c.partial_sum - tol::kCoeffPartial) <= tol::kCoeffPartialTol &&
                    std::abs(c.total - 1.0) <= tol::kCoeffTotalTol && secs < tol::kCoeffSeconds;
  return {pass, fmt("partial sum %.5f (want %.4f +- %.4f), total - 1 = %.1e, %.2e s (< %.0e s)", c.partial_sum,
                    tol::kCoeffPartial, tol::kCoeffPartialTol, c.total - 1.0, secs, tol::kCoeffSeconds)};
}

// Shared by criteria 2 and 3.
struct GridLayouts {
  StressProblem full;
  Layout layout;
  double seconds;
};

const GridLayouts& grid_full() {
  static const GridLayouts g = [] {
    const auto start = Clock::now();
    auto prob = StressProblem::full(synth_grid(20, 20));
    auto layout = solve_layout(prob, {{}, 0, 2});
    return GridLayouts{std::move(prob), std::move(layout), std::chrono::duration<double>(Clock::now() - start).count()};
  }();
  return g;
}

Outcome majorization() {
  const auto& g = grid_full();
  const bool monotone = non_increasing(g.layout.energy_trace);
  const double ns = normalized_stress(g.layout.positions, g.full);
  const bool pass = monotone && ns <= tol::kNormalizedStress && g.seconds < tol::kFullSeconds;
  return {pass, fmt("20x20 grid, %d iterations, trace %s, normalized stress %.4f (<= %.2f), %.1f s (< %.0f s)",
                    g.layout.iteration_count, monotone ? "non-increasing" : "INCREASES", ns, tol::kNormalizedStress,
                    g.seconds, tol::kFullSeconds)};
}

Outcome sparse_fidelity() {
  const auto& g = grid_full();
  const auto start = Clock::now();
  const Graph grid = synth_grid(20, 20);
  const auto sparse = StressProblem::sparse(grid, select_pivots_maxmin(grid, 50, 0));
  const Layout layout = solve_layout(sparse, {{}, 0, 2});
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  const double ratio = stress_energy(layout.positions, g.full) / g.layout.energy_trace.back();
  const bool pass = ratio <= tol::kSparseRatio && secs < tol::kSparseSeconds;
  return {pass, fmt("50 pivots, full energy of sparse layout / full layout = %.4f (<= %.1f), %.1f s (< %.0f s)", ratio,
                    tol::kSparseRatio, secs, tol::kSparseSeconds)};
}

// Each chosen pivot must be farthest from the earlier ones, lowest id on ties.
bool replay_maxmin(const Graph& g, const PivotSet& ps) {
  const auto fw = oracle::floyd_warshall(g);
  const auto n = static_cast<std::size_t>(g.num_nodes());
  std::vector<long> nearest(n, oracle::kInf);
  for (std::size_t k = 0; k < ps.pivots.size(); ++k) {
    const auto p = static_cast<std::size_t>(ps.pivots[k]);
    if (k > 0) {
      for (std::size_t v = 0; v < n; ++v) {
        if (nearest[v] > nearest[p] || (nearest[v] == nearest[p] && v < p)) return false;
      }
    }
    for (std::size_t v = 0; v < n; ++v) nearest[v] = std::min(nearest[v], fw[p][v]);
  }
  return true;
}

Outcome maxmin() {
  int replayed = 0;
  int deterministic = 0;
  for (int s = 0; s < tol::kMaxminGraphs; ++s) {
    const auto seed = static_cast<std::uint32_t>(s);
    const NodeId n = 10 + static_cast<NodeId>((seed * 37) % (tol::kMaxminMaxNodes - 9));
    const Graph g = oracle::random_connected_graph(n, 2.0 / n, seed + 1000);
    const std::int32_t m = std::min<NodeId>(n, 5 + static_cast<NodeId>(seed % 20));
    const auto a = select_pivots_maxmin(g, m, seed);
    const auto b = select_pivots_maxmin(g, m, seed);
    replayed += replay_maxmin(g, a);
    deterministic += a.pivots == b.pivots && a.region == b.region;
  }
  const bool pass = replayed == tol::kMaxminGraphs && deterministic == tol::kMaxminGraphs;
  return {pass, fmt("greedy replay %d/%d graphs (n <= %d), repeat runs identical %d/%d", replayed, tol::kMaxminGraphs,
                    tol::kMaxminMaxNodes, deterministic, tol::kMaxminGraphs)};
}

// Smallest cosine between two nonzero rows of the same connected component.
double min_row_cosine_within_components(const Graph& g, const Matrix& x) {
  std::int32_t count = 0;
  const auto comp = g.component_labels(&count);
  double worst = 1.0;
  for (std::int32_t c = 0; c < count; ++c) {
    std::vector<Eigen::Index> rows;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      if (comp[static_cast<std::size_t>(v)] == c && x.row(v).norm() > 0.0) rows.push_back(v);
    }
    if (rows.size() < 2) continue;
    Matrix unit(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) unit.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]).normalized();
    const Matrix gram = unit * unit.transpose();
    worst = std::min(worst, gram.minCoeff());
  }
  return worst;
}

Outcome fixed_points() {
  const auto start = Clock::now();
  const auto& ds = cora();
  const Operator da = build_operator(ds.graph, OperatorVariant::kDA);
  const Matrix out = propagate_linear(da, ds.features, 1000, true).x;
  const double within = min_row_cosine_within_components(ds.graph, out);
  // For information: the whole-graph column alignment with the all-ones vector.
  const Vector ones = Vector::Ones(out.rows()).normalized();
  double global = 1.0;
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    if (out.col(c).norm() > 0.0) global = std::min(global, std::abs(out.col(c).dot(ones)) / out.col(c).norm());
  }
  double worst_dad = 1.0;
  for (std::uint32_t seed = 0; seed < 10; ++seed) {
    const Graph g = oracle::random_connected_graph(6 + static_cast<NodeId>(seed % 10), 0.3, seed);
    const Operator dad = build_operator(g, OperatorVariant::kDAD);
    const Eigen::VectorXd v = oracle::dominant_eigenvector(dad.to_dense());
    const Matrix y = propagate_linear(dad, random_matrix(g.num_nodes(), 3, seed).cwiseAbs(), 1000, true).x;
    for (Eigen::Index c = 0; c < y.cols(); ++c) worst_dad = std::min(worst_dad, std::abs(y.col(c).dot(v)) / y.col(c).norm());
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  const bool pass = within >= tol::kFixedPointCosine && worst_dad >= tol::kFixedPointCosine && secs < tol::kFixedPointSeconds;
  return {pass, fmt("Cora DA k=1000 min row cosine within components %.6f, DAD vs eigensolver min cosine %.6f "
                    "(>= %.3f; whole-graph column cosine with ones %.4f over 78 components), %.1f s (< %.0f s)",
                    within, worst_dad, tol::kFixedPointCosine, global, secs, tol::kFixedPointSeconds)};
}

Outcome three_stages() {
  const auto start = Clock::now();
  const auto& ds = cora();
  const Matrix x = random_features(ds.graph.num_nodes(), 300, 0);
  const Operator da = build_operator(ds.graph, OperatorVariant::kDA);
  std::vector<int> ks{0};
  for (int k = 20; k <= 60; ++k) ks.push_back(k);
  ks.push_back(1000);
  std::vector<Indiscernibility> ind;
  const auto splits = cora_splits();
  const auto report = depth_sweep(da, PropagationFamily::kPlain, x, ds.labels, splits, ks, probe_defaults(),
                                  [&](int k, const Matrix& cur) {
                                    if (k == 0 || k == 1000) ind.push_back(indiscernibility(cur, tol::kIndiscernibleEps));
                                  });
  const double acc0 = report.per_depth.front().mean();
  double peak = 0.0;
  int peak_k = 0;
  for (std::size_t i = 1; i + 1 < report.per_depth.size(); ++i) {
    if (report.per_depth[i].mean() > peak) {
      peak = report.per_depth[i].mean();
      peak_k = report.per_depth[i].depth;
    }
  }
  const double deep = report.per_depth.back().mean();
  std::vector<int> counts;
  for (auto y : ds.labels) {
    if (static_cast<std::size_t>(y) >= counts.size()) counts.resize(static_cast<std::size_t>(y) + 1, 0);
    ++counts[static_cast<std::size_t>(y)];
  }
  const double majority = static_cast<double>(*std::max_element(counts.begin(), counts.end())) /
                          static_cast<double>(ds.labels.size());
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  const bool pass = peak - acc0 >= tol::kStageGain && std::abs(deep - majority) <= tol::kStageMajorityGap &&
                    ind.back().node_fraction >= tol::kIndiscernibleDeep &&
                    ind.front().node_fraction <= tol::kIndiscernibleShallow && secs < tol::kStageSeconds;
  return {pass, fmt("%d splits, k=0 acc %.3f, peak %.3f at k=%d (gain >= %.2f), k=1000 acc %.3f vs majority %.3f "
                    "(within %.2f), node indiscernibility %.3f at k=0 (<= %.2f) and %.3f at k=1000 (>= %.1f), "
                    "%.0f s (< %.0f s)",
                    kCoraSplits, acc0, peak, peak_k, tol::kStageGain, deep, majority, tol::kStageMajorityGap,
                    ind.front().node_fraction, tol::kIndiscernibleShallow, ind.back().node_fraction,
                    tol::kIndiscernibleDeep, secs, tol::kStageSeconds)};
}

Outcome deep_linear() {
  const auto start = Clock::now();
  const auto& ds = cora();
  const Matrix x = row_normalize_l1(ds.features);
  const auto splits = cora_splits();
  TrainConfig cfg = probe_defaults();
  cfg.alpha = 0.1;

  const std::vector<int> residual_ks{0, 1, 2, 4, 8, 16, 32, 64};
  const Operator renorm = build_operator(ds.graph, OperatorVariant::kRenormDAD);
  const auto residual = depth_sweep(renorm, PropagationFamily::kInitialResidual, x, ds.labels, splits, residual_ks, cfg);
  const double at64 = residual.per_depth.back().mean();
  double best = 0.0;
  int best_k = 0;
  for (const auto& p : residual.per_depth) {
    if (p.mean() > best) {
      best = p.mean();
      best_k = p.depth;
    }
  }

  std::vector<int> plain_ks;
  for (int k = 0; k <= 10; ++k) plain_ks.push_back(k);
  plain_ks.push_back(64);
  const Operator dad = build_operator(ds.graph, OperatorVariant::kDAD);
  const auto plain = depth_sweep(dad, PropagationFamily::kPlain, x, ds.labels, splits, plain_ks, cfg);
  double plain_best = 0.0;
  int plain_best_k = 0;
  for (std::size_t i = 0; i + 1 < plain.per_depth.size(); ++i) {
    if (plain.per_depth[i].mean() > plain_best) {
      plain_best = plain.per_depth[i].mean();
      plain_best_k = plain.per_depth[i].depth;
    }
  }
  const double plain64 = plain.per_depth.back().mean();
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  const bool pass = at64 >= tol::kResidualFloor && best - at64 <= tol::kResidualNearBest &&
                    plain_best - plain64 >= tol::kPlainDrop && secs < tol::kLinearSeconds;
  return {pass, fmt("%d splits, initial-residual renorm-DAD k=64 %.4f (>= %.2f), best %.4f at k=%d (gap <= %.3f); "
                    "plain DAD k=64 %.4f vs best k<=10 %.4f at k=%d (drop >= %.2f), %.0f s (< %.0f s)",
                    kCoraSplits, at64, tol::kResidualFloor, best, best_k, tol::kResidualNearBest, plain64, plain_best,
                    plain_best_k, tol::kPlainDrop, secs, tol::kLinearSeconds)};
}

double gradient_check_worst() {
  double worst = 0.0;
  for (std::uint32_t seed = 0; seed < 6; ++seed) {
    const NodeId n = 10 + static_cast<NodeId>(seed);
    const Graph g = oracle::random_connected_graph(n, 0.2, seed);
    const Operator op = build_operator(g, OperatorVariant::kRenormDAD);
    const Matrix x = random_matrix(n, 5, seed);
    std::vector<std::int32_t> y;
    for (NodeId v = 0; v < n; ++v) y.push_back(static_cast<std::int32_t>((v * 7 + seed) % 3));
    std::vector<NodeId> train;
    for (NodeId v = 0; v < n; v += 2) train.push_back(v);
    auto p = init_stressgcn(5, 4, 3, seed);
    p.b_in = Vector::Constant(4, 0.1);
    const int k = 1 + static_cast<int>(seed % 4);
    const auto analytic = stressgcn_loss_and_grad(op, x, y, train, p, 0.1, k, 5e-4);
    auto check = [&](double& entry, double grad) {
      const double h = 1e-6;
      const double saved = entry;
      entry = saved + h;
      const double up = stressgcn_loss_and_grad(op, x, y, train, p, 0.1, k, 5e-4).loss;
      entry = saved - h;
      const double down = stressgcn_loss_and_grad(op, x, y, train, p, 0.1, k, 5e-4).loss;
      entry = saved;
      const double numeric = (up - down) / (2.0 * h);
      worst = std::max(worst, std::abs(numeric - grad) / (std::max(std::abs(numeric), std::abs(grad)) + 1e-7));
    };
    for (Eigen::Index i = 0; i < p.w_in.size(); ++i) check(p.w_in.data()[i], analytic.grad.w_in.data()[i]);
    for (Eigen::Index i = 0; i < p.b_in.size(); ++i) check(p.b_in[i], analytic.grad.b_in[i]);
    for (Eigen::Index i = 0; i < p.w_out.size(); ++i) check(p.w_out.data()[i], analytic.grad.w_out.data()[i]);
    for (Eigen::Index i = 0; i < p.b_out.size(); ++i) check(p.b_out[i], analytic.grad.b_out[i]);
  }
  return worst;
}

Outcome deep_network() {
  const auto start = Clock::now();
  const double grad_err = gradient_check_worst();
  if (grad_err > tol::kGradientError) {
    return {false, fmt("gradient check failed: worst relative error %.2e (<= %.0e); training skipped", grad_err,
                       tol::kGradientError)};
  }
  const auto& ds = cora();
  const Operator op = build_operator(ds.graph, OperatorVariant::kRenormDAD);
  const auto splits = cora_splits();
  auto mean_at = [&](int k) {
    std::vector<MetricsReport> parts;
    for (int s = 0; s < kCoraSplits; ++s) {
      TrainConfig cfg = stressgcn_defaults();
      cfg.k = k;
      cfg.seed = static_cast<std::uint64_t>(s);
      parts.push_back(train_stressgcn(op, ds.features, ds.labels, splits[static_cast<std::size_t>(s)], cfg));
    }
    return merge_reports(parts);
  };
  const auto r16 = mean_at(16);
  const auto r64 = mean_at(64);
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  const bool pass = r16.mean() >= tol::kDeepFloor && std::abs(r64.mean() - r16.mean()) <= tol::kDeepCollapse &&
                    secs < tol::kDeepSeconds;
  return {pass, fmt("gradient check worst %.1e (<= %.0e); %d splits, 16 layers %.4f +- %.4f (>= %.2f), "
                    "64 layers %.4f +- %.4f (within %.2f), %.0f s (< %.0f s)",
                    grad_err, tol::kGradientError, kCoraSplits, r16.mean(), r16.std(), tol::kDeepFloor, r64.mean(),
                    r64.std(), tol::kDeepCollapse, secs, tol::kDeepSeconds)};
}

struct LinkResult {
  MetricsReport report;
  double lr = 0.0;
};

// Every model gets the learning rate with the best mean validation AUC, so a
// baseline that stalls at one step size is not reported untrained.
LinkResult link_runs(const std::string& which, const std::string& embed) {
  LinkResult best;
  double best_val = -1.0;
  for (double lr : {0.01, 0.05, 0.1}) {
    std::vector<MetricsReport> parts;
    double val = 0.0;
    for (int s = 0; s < kLinkSeeds; ++s) {
      const auto seed = static_cast<std::uint64_t>(s);
      const Graph g = which == "com1" ? synth_caveman(20, 20, 0.01, seed).graph : synth_grid(20, 20);
      EmbedSpec spec = parse_embed_spec(embed);
      spec.pivots = 64;
      spec.seed = seed;
      TrainConfig cfg = link_defaults();
      cfg.lr = lr;
      cfg.seed = seed;
      parts.push_back(train_link_model(make_embed_fn(spec), split_links(g, 0.1, 0.1, seed), cfg));
      val += parts.back().runs.front().val;
    }
    if (val > best_val) {
      best_val = val;
      best = {merge_reports(parts), lr};
    }
  }
  return best;
}

Outcome repulsion() {
  const auto start = Clock::now();
  const auto com_e = link_runs("com1", "e");
  const auto com_local = link_runs("com1", "local:renorm-dad:2");
  const auto grid_e = link_runs("grid1", "e");
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  const auto com_da = link_runs("com1", "local:da:2");
  const bool pass = com_e.report.mean() >= tol::kRepulsiveCom && com_local.report.mean() <= tol::kLocalCeiling &&
                    grid_e.report.mean() >= tol::kRepulsiveGrid && secs < tol::kLinkSeconds;
  return {pass, fmt("%d seeds, lr by validation AUC; Com-1 repulsive AUC %.4f +- %.4f (>= %.2f, lr %g), Com-1 local "
                    "renorm-DAD k=2 AUC %.4f +- %.4f (<= %.2f, lr %g), Grid-1 repulsive AUC %.4f +- %.4f (>= %.2f, "
                    "lr %g), %.0f s (< %.0f s); also Com-1 local DA k=2 AUC %.4f",
                    kLinkSeeds, com_e.report.mean(), com_e.report.std(), tol::kRepulsiveCom, com_e.lr,
                    com_local.report.mean(), com_local.report.std(), tol::kLocalCeiling, com_local.lr,
                    grid_e.report.mean(), grid_e.report.std(), tol::kRepulsiveGrid, grid_e.lr, secs, tol::kLinkSeconds,
                    com_da.report.mean())};
}

Outcome virtual_pivots() {
  const auto start = Clock::now();
  // One mean update with a single pivot over a random graph; the mean is summed directly.
  const Graph g = oracle::random_connected_graph(40, 0.1, 5);
  const auto ps = select_pivots_maxmin(g, 1, 0);
  const Matrix x = random_matrix(40, 3, 5);
  const Matrix out = virtual_pivot_propagate(augment_with_pivots(g, ps), OperatorVariant::kDA, x, ps, 1, PivotWeight::kMean);
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(3);
  for (Eigen::Index i = 0; i < 40; ++i) mean += x.row(i);
  mean /= 40.0;
  const double mean_err = (out.row(40) - mean).cwiseAbs().maxCoeff();

  const Graph mesh = synth_grid(20, 10);
  const double theta = default_theta(mesh);
  const auto base = StressProblem::binary(mesh, theta);
  const double e_base = stress_energy(solve_layout(base, {{}, 0, 2}).positions, base);
  const auto mesh_ps = select_pivots_maxmin(mesh, 1, 0);
  auto restricted = [&](VirtualEdgeWeight w) {
    const Layout l = solve_layout(StressProblem::binary(augment_with_pivots(mesh, mesh_ps, w), theta), {{}, 0, 2});
    return stress_energy(Matrix(l.positions.topRows(mesh.num_nodes())), base);
  };
  const double e_unit = restricted(VirtualEdgeWeight::kUnit);
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  const double e_mean = restricted(VirtualEdgeWeight::kMean);
  const double rel = std::abs(e_unit / e_base - 1.0);
  const bool pass = mean_err <= tol::kMeanUpdate && rel <= tol::kVirtualEnergy && secs < tol::kVirtualSeconds;
  return {pass, fmt("mean update error %.1e (<= %.0e); 200-node mesh binary energy with unit virtual edges / without "
                    "= %.4f (within %.2f), %.1f s (< %.0f s); with 1/|region| edge weights %.4f",
                    mean_err, tol::kMeanUpdate, e_unit / e_base, tol::kVirtualEnergy, secs, tol::kVirtualSeconds,
                    e_mean / e_base)};
}

Outcome oracles() {
  const auto start = Clock::now();
  int auc_ok = 0;
  for (std::uint32_t seed = 0; seed < 100; ++seed) {
    std::mt19937 gen(seed);
    const std::size_t n = 4 + gen() % 200;
    std::vector<double> scores(n);
    std::vector<std::int8_t> labels(n);
    std::vector<int> labels_int(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = static_cast<double>(gen() % 20) / 4.0;
      labels_int[i] = static_cast<int>(i < 2 ? i : gen() % 2);
      labels[i] = static_cast<std::int8_t>(labels_int[i]);
    }
    auc_ok += roc_auc(scores, labels) == oracle::pair_counting_auc(scores, labels_int);
  }
  int bfs_ok = 0;
  for (std::uint32_t seed = 0; seed < 30; ++seed) {
    const NodeId n = 2 + static_cast<NodeId>(seed * 11 % 63);
    const Graph g = oracle::random_graph(n, 2.0 / n, seed);
    const auto fw = oracle::floyd_warshall(g);
    const auto apsp = all_pairs_shortest(g);
    bool same = true;
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = 0; j < n; ++j) {
        const Hop h = apsp.at(static_cast<std::size_t>(i), j);
        const long want = fw[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        same = same && (want == oracle::kInf ? h == kUnreachable : h == want);
      }
    }
    bfs_ok += same;
  }
  int unroll_ok = 0;
  int unroll_total = 0;
  for (std::uint32_t seed = 0; seed < 4; ++seed) {
    const Graph g = oracle::random_connected_graph(12, 0.2, seed);
    const Operator op = build_operator(g, seed % 2 ? OperatorVariant::kRenormDAD : OperatorVariant::kLazyDA);
    const Matrix x0 = random_matrix(12, 3, seed);
    const Eigen::MatrixXd m = op.to_dense();
    for (int k = 0; k <= 8; ++k) {
      PropagationConfig cfg;
      cfg.alpha = 0.1;
      cfg.k = k;
      Eigen::MatrixXd power = x0;
      Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(12, 3);
      for (int i = 0; i < k; ++i) {
        expect += 0.1 * std::pow(0.9, i) * power;
        power = m * power;
      }
      expect += std::pow(0.9, k) * power;
      const Eigen::MatrixXd got = simplified_stress_propagate(op, x0, cfg);
      unroll_ok += (got - expect).norm() <= tol::kUnrollRelative * expect.norm();
      ++unroll_total;
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  const bool pass = auc_ok == 100 && bfs_ok == 30 && unroll_ok == unroll_total && secs < tol::kOracleSeconds;
  return {pass, fmt("AUC equals pair counting %d/100, BFS equals Floyd-Warshall %d/30 (n <= 64), unrolled sum "
                    "matches recursion %d/%d (rel %.0e), %.1f s (< %.0f s)",
                    auc_ok, bfs_ok, unroll_ok, unroll_total, tol::kUnrollRelative, secs, tol::kOracleSeconds)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"coefficient identity", coefficients},  {"majorization", majorization},
      {"sparse stress fidelity", sparse_fidelity}, {"maxmin pivots", maxmin},
      {"fixed points", fixed_points},          {"three stages", three_stages},
      {"deep linear models", deep_linear},     {"deep network", deep_network},
      {"repulsion", repulsion},                {"virtual pivots", virtual_pivots},
      {"oracles", oracles},
  };
  std::set<int> only;
  if (argc > 1) {
    for (int id : parse_int_list(argv[1])) only.insert(id);
  }
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %2d %s %s: %s\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed;
}
