#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stressgraph/graph.hpp"
#include "stressgraph/pivots.hpp"
#include "stressgraph/types.hpp"

namespace stressgraph {

enum class StressMode { kBinary, kFull, kSparse };

std::string_view to_string(StressMode mode);
/// Accepts binary, full, sparse.
StressMode parse_stress_mode(std::string_view name);

struct StressTerm {
  NodeId i = 0;
  NodeId j = 0;
  double weight = 0.0;
  double target = 0.0;
};

/**
 * Energy of the form sum over terms of weight * (|P_i - P_j| - target)^2.
 *
 * kFull keeps the all-pairs hop table and uses weight target^-2 on every
 * pair. kSparse keeps an explicit term list. kBinary keeps its edge terms
 * (weight 1, target 0) in the list and adds theta * (|P_i - P_j| - 1)^2 over
 * ordered pairs i != j implicitly.
 */
class StressProblem {
 public:
  /// All-pairs stress; throws on a disconnected graph.
  static StressProblem full(const Graph& g, NodeId cap = kDefaultAllPairsCap);
  static StressProblem full(DistanceTable all_pairs);
  /// Edge terms take the graph's edge weights (1 when unweighted).
  static StressProblem binary(const Graph& g, double theta);
  /**
   * Edge terms (target 1, weight 1) plus, for every node i and pivot p with
   * p != i and p not adjacent to i, a term with target d_ip and weight
   * psi_ip / d_ip^2. Pivots unreachable from i are skipped and counted.
   */
  static StressProblem sparse(const Graph& g, const PivotSet& pivots);
  static StressProblem from_terms(NodeId n, std::vector<StressTerm> terms);

  StressMode mode() const { return mode_; }
  NodeId num_nodes() const { return n_; }
  double theta() const { return theta_; }
  const std::vector<StressTerm>& terms() const { return terms_; }
  const DistanceTable& distances() const { return distances_; }
  std::size_t dropped_terms() const { return dropped_; }
  /// Number of pairs the energy sums over, for per-pair normalization.
  std::size_t num_pairs() const;

  int max_iters = 500;
  double tol = 1e-6;

 private:
  StressMode mode_ = StressMode::kSparse;
  NodeId n_ = 0;
  double theta_ = 0.0;
  std::vector<StressTerm> terms_;
  DistanceTable distances_;
  std::size_t dropped_ = 0;
};

/// 0.1 * |E| / n^2.
double default_theta(const Graph& g);

struct Layout {
  Matrix positions;  // n x m
  int iteration_count = 0;
  std::vector<double> energy_trace;  // starts with the initial energy
};

double stress_energy(const Matrix& positions, const StressProblem& prob);
/// Energy divided by StressProblem::num_pairs().
double normalized_stress(const Matrix& positions, const StressProblem& prob);

/**
 * One majorization step: minimizes the convex majorant of the energy built at
 * the current positions (the Guttman transform), per axis, with a warm-started
 * conjugate gradient solve. Each conjugate gradient iterate lowers the majorant,
 * so the energy never increases even when the solve stops early.
 * inv(0) = 0 for coincident pairs. Appends the new energy to the trace.
 */
Layout majorization_step(const Layout& layout, const StressProblem& prob);

struct LayoutInit {
  std::optional<Matrix> given;  // used as is when present
  std::uint64_t seed = 0;       // otherwise uniform in the unit square
  int dims = 2;
};

/// Iterates majorization steps until the relative energy change drops below
/// prob.tol or prob.max_iters steps have run. Coincident starting points are
/// jittered by up to 1e-6.
Layout solve_layout(const StressProblem& prob, const LayoutInit& init = {});

struct SvgOptions {
  bool draw_virtual_edges = true;
  bool highlight_pivots = true;
  std::vector<NodeId> extra_highlight;  // real nodes to draw red as well
  double canvas = 800.0;
  double node_radius = 3.0;
};

/// Deterministic SVG text. Positions must have 2 columns.
std::string render_svg(const Matrix& positions, const Graph& g, const SvgOptions& opts = {});
void export_svg(const Matrix& positions, const Graph& g, const std::filesystem::path& path,
                const SvgOptions& opts = {});

}  // namespace stressgraph
