#include "stressgraph/layout.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include "stressgraph/parallel.hpp"
#include "stressgraph/random.hpp"

namespace stressgraph {

std::string_view to_string(StressMode mode) {
  switch (mode) {
    case StressMode::kBinary: return "binary";
    case StressMode::kFull: return "full";
    case StressMode::kSparse: return "sparse";
  }
  return "unknown";
}

StressMode parse_stress_mode(std::string_view name) {
  for (auto m : {StressMode::kBinary, StressMode::kFull, StressMode::kSparse}) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown stress mode '" + std::string(name) + "'");
}

StressProblem StressProblem::full(const Graph& g, NodeId cap) {
  if (!g.is_connected()) {
    throw std::domain_error("full stress needs a connected graph (unreachable pairs have no target)");
  }
  return full(all_pairs_shortest(g, cap));
}

StressProblem StressProblem::full(DistanceTable all_pairs) {
  const NodeId n = all_pairs.num_nodes();
  if (all_pairs.num_sources() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("full stress needs one distance row per node");
  }
  if (!all_pairs.all_finite()) {
    throw std::domain_error("full stress distances contain unreachable pairs");
  }
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = 0; j < n; ++j) {
      if (i != j && all_pairs.at(static_cast<std::size_t>(i), j) <= 0) {
        throw std::invalid_argument("full stress targets must be positive off the diagonal");
      }
    }
  }
  StressProblem p;
  p.mode_ = StressMode::kFull;
  p.n_ = n;
  p.distances_ = std::move(all_pairs);
  return p;
}

StressProblem StressProblem::binary(const Graph& g, double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("binary stress needs theta > 0");
  StressProblem p;
  p.mode_ = StressMode::kBinary;
  p.n_ = g.num_nodes();
  p.theta_ = theta;
  for (NodeId u = 0; u < p.n_; ++u) {
    const auto nb = g.neighbors(u);
    const auto w = g.edge_weights(u);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (u < nb[k]) p.terms_.push_back({u, nb[k], w[k], 0.0});
    }
  }
  return p;
}

StressProblem StressProblem::sparse(const Graph& g, const PivotSet& pivots) {
  if (pivots.size() == 0) throw std::invalid_argument("sparse stress needs pivots");
  if (pivots.num_nodes() != g.num_nodes()) {
    throw std::invalid_argument("pivot set was computed on a different graph");
  }
  StressProblem p;
  p.mode_ = StressMode::kSparse;
  p.n_ = g.num_nodes();
  for (const auto& e : g.edge_list()) p.terms_.push_back({e.u, e.v, 1.0, 1.0});
  for (NodeId i = 0; i < p.n_; ++i) {
    for (std::size_t k = 0; k < pivots.size(); ++k) {
      const NodeId piv = pivots.pivots[k];
      if (piv == i || g.has_edge(i, piv)) continue;
      const Hop d = pivots.dist.at(k, i);
      if (d == kUnreachable) {
        ++p.dropped_;
        continue;
      }
      const double dd = static_cast<double>(d);
      p.terms_.push_back({i, piv, pivots.psi_at(k, i) / (dd * dd), dd});
    }
  }
  return p;
}

StressProblem StressProblem::from_terms(NodeId n, std::vector<StressTerm> terms) {
  for (const auto& t : terms) {
    if (t.i < 0 || t.i >= n || t.j < 0 || t.j >= n || t.i == t.j) {
      throw std::invalid_argument("stress term endpoints must be distinct nodes in range");
    }
    if (!(t.weight >= 0.0) || !(t.target >= 0.0)) {
      throw std::invalid_argument("stress term weights and targets must be non-negative");
    }
  }
  StressProblem p;
  p.mode_ = StressMode::kSparse;
  p.n_ = n;
  p.terms_ = std::move(terms);
  return p;
}

std::size_t StressProblem::num_pairs() const {
  const auto n = static_cast<std::size_t>(n_);
  if (mode_ == StressMode::kSparse) return terms_.size();
  return n * (n - 1) / 2;
}

double default_theta(const Graph& g) {
  const double n = g.num_nodes();
  return n > 0 ? 0.1 * static_cast<double>(g.num_edges()) / (n * n) : 0.0;
}

namespace {

// Inverse square table indexed by hop count.
std::vector<double> inverse_squares(const DistanceTable& d) {
  Hop max_hop = 0;
  for (std::size_t s = 0; s < d.num_sources(); ++s) {
    for (Hop h : d.row(s)) max_hop = std::max(max_hop, h);
  }
  std::vector<double> inv(static_cast<std::size_t>(max_hop) + 1, 0.0);
  for (std::size_t h = 1; h < inv.size(); ++h) inv[h] = 1.0 / static_cast<double>(h * h);
  return inv;
}

double term_energy(const Matrix& p, const std::vector<StressTerm>& terms) {
  double e = 0.0;
  for (const auto& t : terms) {
    const double gap = (p.row(t.i) - p.row(t.j)).norm() - t.target;
    e += t.weight * gap * gap;
  }
  return e;
}

// Sum over i < j of f(i, j), accumulated per row then in row order so the
// result does not depend on the thread count.
template <typename PairFn>
double pair_sum(NodeId n, PairFn&& f) {
  std::vector<double> row(static_cast<std::size_t>(n), 0.0);
  parallel_for(
      0, static_cast<std::size_t>(n),
      [&](std::size_t i) {
        double s = 0.0;
        for (auto j = static_cast<NodeId>(i) + 1; j < n; ++j) s += f(static_cast<NodeId>(i), j);
        row[i] = s;
      },
      16);
  return std::accumulate(row.begin(), row.end(), 0.0);
}

class Majorizer {
 public:
  explicit Majorizer(const StressProblem& prob) : prob_(prob) {
    if (prob.mode() == StressMode::kFull) inv_sq_ = inverse_squares(prob.distances());
  }

  // y = L_w x, column by column.
  void laplacian(const Matrix& x, Matrix& y) const {
    const NodeId n = prob_.num_nodes();
    y.setZero(x.rows(), x.cols());
    switch (prob_.mode()) {
      case StressMode::kFull: {
        const auto& d = prob_.distances();
        parallel_for(
            0, static_cast<std::size_t>(n),
            [&](std::size_t i) {
              const auto row = d.row(i);
              auto yi = y.row(static_cast<Eigen::Index>(i));
              const auto xi = x.row(static_cast<Eigen::Index>(i));
              for (NodeId j = 0; j < n; ++j) {
                if (static_cast<std::size_t>(j) == i) continue;
                yi.noalias() += inv_sq_[static_cast<std::size_t>(row[static_cast<std::size_t>(j)])] * (xi - x.row(j));
              }
            },
            16);
        break;
      }
      case StressMode::kBinary: {
        // Ordered pairs i != j give weight 2 theta per unordered pair.
        const double w = 2.0 * prob_.theta();
        const Eigen::RowVectorXd total = x.colwise().sum();
        for (NodeId i = 0; i < n; ++i) y.row(i) = w * (static_cast<double>(n) * x.row(i) - total);
        add_terms(x, y);
        break;
      }
      case StressMode::kSparse: add_terms(x, y); break;
    }
  }

  // b = B(P) P: sum over terms of weight * target * (p_i - p_j) * inv(|p_i - p_j|).
  Matrix rhs(const Matrix& p) const {
    const NodeId n = prob_.num_nodes();
    Matrix b = Matrix::Zero(p.rows(), p.cols());
    if (prob_.mode() == StressMode::kFull || prob_.mode() == StressMode::kBinary) {
      const bool full = prob_.mode() == StressMode::kFull;
      const auto& d = prob_.distances();
      const double binary_w = 2.0 * prob_.theta();
      parallel_for(
          0, static_cast<std::size_t>(n),
          [&](std::size_t i) {
            auto bi = b.row(static_cast<Eigen::Index>(i));
            const auto pi = p.row(static_cast<Eigen::Index>(i));
            for (NodeId j = 0; j < n; ++j) {
              if (static_cast<std::size_t>(j) == i) continue;
              const double len = (pi - p.row(j)).norm();
              if (len == 0.0) continue;
              // weight * target is 1 / d for inverse-square weights.
              const double wd = full ? 1.0 / static_cast<double>(d.row(i)[static_cast<std::size_t>(j)]) : binary_w;
              bi.noalias() += (wd / len) * (pi - p.row(j));
            }
          },
          16);
    }
    for (const auto& t : prob_.terms()) {
      if (t.target == 0.0 || t.weight == 0.0) continue;
      const double len = (p.row(t.i) - p.row(t.j)).norm();
      if (len == 0.0) continue;
      const double scale = t.weight * t.target / len;
      for (Eigen::Index c = 0; c < p.cols(); ++c) {
        const double f = scale * (p(t.i, c) - p(t.j, c));
        b(t.i, c) += f;
        b(t.j, c) -= f;
      }
    }
    return b;
  }

 private:
  void add_terms(const Matrix& x, Matrix& y) const {
    const Eigen::Index cols = x.cols();
    for (const auto& t : prob_.terms()) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        const double f = t.weight * (x(t.i, c) - x(t.j, c));
        y(t.i, c) += f;
        y(t.j, c) -= f;
      }
    }
  }

  const StressProblem& prob_;
  std::vector<double> inv_sq_;
};

// Conjugate gradient on L x = b for every column at once, warm-started at x.
// L is positive semidefinite and b lies in its range, so the iterates stay
// in x0 + range(L) and the quadratic decreases monotonically.
void conjugate_gradient(const Majorizer& maj, const Matrix& b, Matrix& x, int max_iters, double rel_tol) {
  Matrix r;
  maj.laplacian(x, r);
  r = b - r;
  Matrix dir = r;
  Matrix q;
  const Eigen::Index cols = x.cols();
  Eigen::VectorXd rr(cols);
  Eigen::VectorXd stop(cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    rr[c] = r.col(c).squaredNorm();
    const double bn = b.col(c).norm();
    stop[c] = std::max(rel_tol * bn, 1e-300);
    stop[c] *= stop[c];
  }
  for (int it = 0; it < max_iters; ++it) {
    bool active = false;
    for (Eigen::Index c = 0; c < cols; ++c) active |= rr[c] > stop[c];
    if (!active) break;
    maj.laplacian(dir, q);
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (rr[c] <= stop[c]) continue;
      const double curvature = dir.col(c).dot(q.col(c));
      if (!(curvature > 0.0)) {
        stop[c] = rr[c];  // direction in the null space; nothing left to gain
        continue;
      }
      const double alpha = rr[c] / curvature;
      x.col(c) += alpha * dir.col(c);
      r.col(c) -= alpha * q.col(c);
      const double next = r.col(c).squaredNorm();
      dir.col(c) = r.col(c) + (next / rr[c]) * dir.col(c);
      rr[c] = next;
    }
  }
}

void recenter(Matrix& p, const Eigen::RowVectorXd& target_mean) {
  const Eigen::RowVectorXd mean = p.colwise().mean();
  p.rowwise() += target_mean - mean;
}

}  // namespace

double stress_energy(const Matrix& positions, const StressProblem& prob) {
  if (positions.rows() != prob.num_nodes()) {
    throw std::invalid_argument("layout has " + std::to_string(positions.rows()) + " rows, problem has " +
                                std::to_string(prob.num_nodes()) + " nodes");
  }
  const NodeId n = prob.num_nodes();
  switch (prob.mode()) {
    case StressMode::kFull: {
      const auto& d = prob.distances();
      return pair_sum(n, [&](NodeId i, NodeId j) {
        const double target = d.at(static_cast<std::size_t>(i), j);
        const double gap = (positions.row(i) - positions.row(j)).norm() - target;
        return gap * gap / (target * target);
      });
    }
    case StressMode::kBinary: {
      const double repulsive = pair_sum(n, [&](NodeId i, NodeId j) {
        const double gap = (positions.row(i) - positions.row(j)).norm() - 1.0;
        return gap * gap;
      });
      return term_energy(positions, prob.terms()) + 2.0 * prob.theta() * repulsive;
    }
    case StressMode::kSparse: return term_energy(positions, prob.terms());
  }
  return 0.0;
}

double normalized_stress(const Matrix& positions, const StressProblem& prob) {
  const auto pairs = prob.num_pairs();
  return pairs ? stress_energy(positions, prob) / static_cast<double>(pairs) : 0.0;
}

Layout majorization_step(const Layout& layout, const StressProblem& prob) {
  if (prob.num_nodes() < 2) throw std::invalid_argument("majorization needs at least 2 nodes");
  if (layout.positions.rows() != prob.num_nodes()) {
    throw std::invalid_argument("layout and problem sizes differ");
  }
  const Majorizer maj(prob);
  const Matrix b = maj.rhs(layout.positions);
  Layout next = layout;
  const Eigen::RowVectorXd mean = layout.positions.colwise().mean();
  conjugate_gradient(maj, b, next.positions, 200, 1e-10);
  // The solve is translation-free per connected block; keep the global mean fixed.
  recenter(next.positions, mean);
  next.iteration_count = layout.iteration_count + 1;
  next.energy_trace.push_back(stress_energy(next.positions, prob));
  return next;
}

Layout solve_layout(const StressProblem& prob, const LayoutInit& init) {
  const NodeId n = prob.num_nodes();
  Layout layout;
  Rng rng(init.seed);
  if (init.given) {
    if (init.given->rows() != n) throw std::invalid_argument("initial layout has the wrong row count");
    layout.positions = *init.given;
  } else {
    if (init.dims < 1) throw std::invalid_argument("layout dimension must be positive");
    layout.positions.resize(n, init.dims);
    for (Eigen::Index i = 0; i < layout.positions.rows(); ++i) {
      for (Eigen::Index c = 0; c < layout.positions.cols(); ++c) layout.positions(i, c) = rng.uniform();
    }
  }
  if (!layout.positions.allFinite()) throw std::invalid_argument("initial layout is not finite");

  // Separate coincident starting points: sort rows and nudge exact repeats.
  std::vector<NodeId> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const auto& p = layout.positions;
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    for (Eigen::Index c = 0; c < p.cols(); ++c) {
      if (p(a, c) != p(b, c)) return p(a, c) < p(b, c);
    }
    return a < b;
  });
  std::vector<NodeId> repeats;
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (p.row(order[k]) == p.row(order[k - 1])) repeats.push_back(order[k]);
  }
  for (NodeId v : repeats) {
    for (Eigen::Index c = 0; c < layout.positions.cols(); ++c) {
      layout.positions(v, c) += rng.uniform(-1e-6, 1e-6);
    }
  }

  layout.energy_trace.push_back(stress_energy(layout.positions, prob));
  if (n < 2) return layout;
  for (int it = 0; it < prob.max_iters; ++it) {
    const double before = layout.energy_trace.back();
    layout = majorization_step(layout, prob);
    const double after = layout.energy_trace.back();
    if (before <= 0.0 || std::abs(before - after) / before < prob.tol) break;
  }
  return layout;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string render_svg(const Matrix& positions, const Graph& g, const SvgOptions& opts) {
  if (positions.cols() != 2) {
    throw std::invalid_argument("SVG export needs a 2-D layout, got " + std::to_string(positions.cols()) +
                                " dimensions");
  }
  if (positions.rows() != g.num_nodes()) throw std::invalid_argument("layout and graph sizes differ");
  const double margin = 4.0 * opts.node_radius;
  double min_x = 0.0, min_y = 0.0, extent = 0.0;
  if (positions.rows() > 0) {
    min_x = positions.col(0).minCoeff();
    min_y = positions.col(1).minCoeff();
    extent = std::max(positions.col(0).maxCoeff() - min_x, positions.col(1).maxCoeff() - min_y);
  }
  const double scale = extent > 0.0 ? (opts.canvas - 2.0 * margin) / extent : 1.0;
  auto sx = [&](NodeId v) { return fmt(margin + (positions(v, 0) - min_x) * scale); };
  auto sy = [&](NodeId v) { return fmt(margin + (positions(v, 1) - min_y) * scale); };

  std::string out;
  const std::string size = fmt(opts.canvas);
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + size + "\" height=\"" + size +
         "\" viewBox=\"0 0 " + size + " " + size + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<g stroke=\"#888888\" stroke-width=\"0.6\">\n";
  for (const auto& e : g.edge_list()) {
    if (!opts.draw_virtual_edges && (g.is_pivot(e.u) || g.is_pivot(e.v))) continue;
    out += "<line x1=\"" + sx(e.u) + "\" y1=\"" + sy(e.u) + "\" x2=\"" + sx(e.v) + "\" y2=\"" + sy(e.v) +
           "\"/>\n";
  }
  out += "</g>\n<g>\n";
  std::vector<char> red(static_cast<std::size_t>(g.num_nodes()), 0);
  if (opts.highlight_pivots) {
    for (NodeId v : g.pivot_nodes()) red[static_cast<std::size_t>(v)] = 1;
    for (NodeId v : opts.extra_highlight) {
      if (v >= 0 && v < g.num_nodes()) red[static_cast<std::size_t>(v)] = 1;
    }
  }
  const std::string r = fmt(opts.node_radius);
  const std::string big_r = fmt(2.0 * opts.node_radius);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const bool hot = red[static_cast<std::size_t>(v)] != 0;
    out += "<circle cx=\"" + sx(v) + "\" cy=\"" + sy(v) + "\" r=\"" + (hot ? big_r : r) + "\" fill=\"" +
           (hot ? "#d62728" : "#1f1f1f") + "\"/>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

void export_svg(const Matrix& positions, const Graph& g, const std::filesystem::path& path,
                const SvgOptions& opts) {
  const std::string text = render_svg(positions, g, opts);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace stressgraph
