#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "stressgraph/graph.hpp"
#include "stressgraph/io.hpp"
#include "stressgraph/operator.hpp"
#include "stressgraph/synth.hpp"

using namespace stressgraph;

namespace {

Graph path3() { return Graph::from_edges(3, std::vector<Edge>{{0, 1}, {1, 2}}); }

std::size_t degree_sum(const Graph& g) {
  std::size_t s = 0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) s += g.degree(v);
  return s;
}

}  // namespace

TEST_CASE("load_graph reads a path") {
  const auto path = oracle::temp_file("path.tsv", "0\t1\n1\t2");
  const auto loaded = load_graph(path);
  CHECK(loaded.graph.num_nodes() == 3);
  CHECK(loaded.graph.num_edges() == 2);
  CHECK(loaded.stats.self_loops_dropped == 0);
}

TEST_CASE("load_graph collapses reversed duplicates") {
  const auto loaded = load_graph(oracle::temp_file("dup.tsv", "0\t1\n1\t0\n"));
  CHECK(loaded.graph.num_edges() == 1);
  CHECK(loaded.stats.duplicates_dropped == 1);
}

TEST_CASE("load_graph drops self-loops and counts them") {
  const auto loaded = load_graph(oracle::temp_file("loop.tsv", "0\t0\n0\t1\n"));
  CHECK(loaded.graph.num_edges() == 1);
  CHECK(loaded.stats.self_loops_dropped == 1);
  CHECK(loaded.graph.check_invariants());
}

TEST_CASE("load_graph reports the malformed line") {
  const auto path = oracle::temp_file("bad.tsv", "0\t1\n1\t2\n2 x\n");
  try {
    load_graph(path);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(load_graph(oracle::temp_file("neg.tsv", "-1\t2\n")), ParseError);
  CHECK_THROWS_AS(load_graph(oracle::temp_file("empty.tsv", "")), ParseError);
  CHECK_THROWS(load_graph("/nonexistent/graph.tsv"));
}

TEST_CASE("edge list round trip") {
  const auto g = synth_grid(4, 3);
  const auto path = std::filesystem::temp_directory_path() / "stressgraph_tests" / "grid.tsv";
  save_edge_list(g, path);
  const auto back = load_graph(path).graph;
  CHECK(back.edge_list() == g.edge_list());
}

TEST_CASE("matrix and label csv") {
  Matrix m(2, 3);
  m << 0.1, -2.5, 1e-300, 3.0, 0.0, 1.0 / 3.0;
  const auto path = std::filesystem::temp_directory_path() / "stressgraph_tests" / "m.csv";
  write_matrix_csv(m, path);
  const Matrix back = read_matrix_csv(path);
  CHECK(back == m);
  CHECK_THROWS_AS(read_matrix_csv(oracle::temp_file("ragged.csv", "1,2\n3\n")), ParseError);
  const auto labels = read_labels_csv(oracle::temp_file("labels.csv", "3\n0\r\n1\n"));
  CHECK(labels == std::vector<std::int32_t>{3, 0, 1});
}

TEST_CASE("synth_grid sizes") {
  const auto g = synth_grid(20, 20);
  CHECK(g.num_nodes() == 400);
  CHECK(g.num_edges() == 760);
  CHECK(synth_grid(1, 1).num_edges() == 0);
  // 3 rows of 2 horizontal edges plus 3 columns of 2 vertical edges.
  CHECK(synth_grid(3, 3).num_edges() == 2 * 3 * 2);
  CHECK_THROWS(synth_grid(0, 5));
}

TEST_CASE("synth_caveman structure") {
  SUBCASE("two triangles") {
    const auto cg = synth_caveman(2, 3, 0.0, 1);
    CHECK(cg.graph.num_nodes() == 6);
    CHECK(cg.graph.num_edges() == 6);
    CHECK(cg.graph.is_connected());
    CHECK(cg.community == std::vector<std::int32_t>{0, 0, 0, 1, 1, 1});
  }
  SUBCASE("Com-1 size") {
    for (std::uint64_t seed : {0u, 1u, 2u}) {
      const auto cg = synth_caveman(20, 20, 0.01, seed);
      CHECK(cg.graph.num_nodes() == 400);
      CHECK(std::abs(static_cast<double>(cg.graph.num_edges()) - 3800.0) <= 38.0);
      CHECK(cg.graph.is_connected());
      CHECK(cg.graph.check_invariants());
    }
  }
  SUBCASE("unrewired degrees") {
    const auto cg = synth_caveman(5, 6, 0.0, 0);
    for (std::int32_t c = 0; c < 5; ++c) {
      std::vector<std::size_t> degrees;
      for (NodeId v = c * 6; v < (c + 1) * 6; ++v) degrees.push_back(cg.graph.degree(v));
      // Inside a clique everyone has size-1 neighbors except the two nodes whose
      // edge moved: the clique's first node keeps its degree by gaining an
      // outside link, node start+1 loses one, and start+size-1 gains one.
      CHECK(degrees[0] == 5);
      CHECK(degrees[1] == 4);
      CHECK(degrees[5] == 6);
      for (std::size_t k = 2; k < 5; ++k) CHECK(degrees[k] == 5);
    }
  }
  SUBCASE("invalid parameters") {
    CHECK_THROWS(synth_caveman(1, 5, 0.0, 0));
    CHECK_THROWS(synth_caveman(3, 2, 0.0, 0));
    CHECK_THROWS(synth_caveman(3, 4, 1.0, 0));
  }
  SUBCASE("deterministic") {
    CHECK(synth_caveman(6, 5, 0.1, 7).graph.edge_list() ==
          synth_caveman(6, 5, 0.1, 7).graph.edge_list());
  }
}

TEST_CASE("bfs_sssp examples") {
  CHECK(bfs_sssp(path3(), 0) == std::vector<Hop>{0, 1, 2});
  const auto g = Graph::from_edges(3, std::vector<Edge>{{0, 1}});
  CHECK(bfs_sssp(g, 0)[2] == kUnreachable);
  CHECK(bfs_sssp(synth_grid(5, 5), 0)[24] == 8);
  CHECK_THROWS_AS(bfs_sssp(g, 3), std::out_of_range);
  CHECK(bfs_limited(synth_grid(5, 5), 0, 2)[3] == kUnreachable);
  CHECK(bfs_limited(synth_grid(5, 5), 0, 2)[2] == 2);
}

TEST_CASE("all_pairs_shortest examples") {
  const auto tri = Graph::from_edges(3, std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}});
  const auto t = all_pairs_shortest(tri);
  for (NodeId i = 0; i < 3; ++i) {
    for (NodeId j = 0; j < 3; ++j) CHECK(t.at(static_cast<std::size_t>(i), j) == (i == j ? 0 : 1));
  }
  CHECK(all_pairs_shortest(path3()).at(0, 2) == 2);
  CHECK_THROWS_AS(all_pairs_shortest(synth_grid(5, 5), 10), std::length_error);
}

TEST_CASE("all_pairs_shortest matches Floyd-Warshall") {
  for (std::uint32_t seed = 0; seed < 40; ++seed) {
    const NodeId n = 2 + static_cast<NodeId>(seed % 63);
    const auto g = oracle::random_graph(n, 2.5 / n, seed);
    const auto fw = oracle::floyd_warshall(g);
    const auto t = all_pairs_shortest(g);
    bool same = true;
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = 0; j < n; ++j) {
        const long expect = fw[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        const Hop got = t.at(static_cast<std::size_t>(i), j);
        same &= expect == oracle::kInf ? got == kUnreachable : got == expect;
      }
    }
    CHECK_MESSAGE(same, "seed " << seed);
  }
}

TEST_CASE("distance table triangle inequality") {
  const auto g = oracle::random_connected_graph(40, 0.05, 3);
  const auto t = all_pairs_shortest(g);
  for (NodeId a = 0; a < 40; a += 3) {
    for (NodeId b = 0; b < 40; b += 2) {
      for (NodeId c = 0; c < 40; c += 5) {
        CHECK(t.at(static_cast<std::size_t>(a), c) <=
              t.at(static_cast<std::size_t>(a), b) + t.at(static_cast<std::size_t>(b), c));
      }
    }
  }
}

TEST_CASE("multi-source BFS picks the lowest-id source on ties") {
  const auto g = path3();
  const std::vector<NodeId> sources{2, 0};
  const auto near = multi_source_bfs(g, sources);
  CHECK(near.source == std::vector<NodeId>{0, 0, 2});
  CHECK(near.dist == std::vector<Hop>{0, 1, 0});
}

TEST_CASE("graph invariants on random graphs") {
  for (std::uint32_t seed = 0; seed < 20; ++seed) {
    const auto g = oracle::random_graph(30, 0.1, seed);
    CHECK(g.check_invariants());
    CHECK(degree_sum(g) == 2 * g.num_edges());
    for (const auto& e : g.edge_list()) {
      CHECK(g.has_edge(e.u, e.v));
      CHECK(g.has_edge(e.v, e.u));
    }
  }
}

TEST_CASE("weighted graphs keep symmetric weights") {
  const std::vector<Edge> edges{{0, 1}, {1, 2}, {1, 0}};
  const std::vector<double> w{2.0, 0.5, 9.0};
  const auto g = Graph::from_weighted_edges(3, edges, w);
  CHECK(g.num_edges() == 2);
  CHECK(g.edge_weights(0) == std::vector<double>{2.0});
  CHECK(g.edge_weights(1) == std::vector<double>{2.0, 0.5});
  CHECK(g.check_invariants());
}

TEST_CASE("operator examples") {
  const auto da = build_operator(path3(), OperatorVariant::kDA);
  CHECK(da.weight(1, 1) == 1.0);
  CHECK(da.weight(1, 0) == 0.5);
  CHECK(da.weight(1, 2) == 0.5);
  CHECK(da.weight(0, 2) == 0.0);

  const auto cycle = Graph::from_edges(4, std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  const auto rwn = build_operator(cycle, OperatorVariant::kRWN, 11);
  for (NodeId i = 0; i < 4; ++i) {
    double sq = 0.0;
    for (double v : rwn.row_values(i)) sq += v * v;
    CHECK(std::abs(std::sqrt(sq) - 1.0) <= 1e-12);
  }
  CHECK_THROWS(build_operator(cycle, OperatorVariant::kRAN, 0));
}

TEST_CASE("operator row sums and patterns") {
  for (std::uint32_t seed = 0; seed < 10; ++seed) {
    const auto g = oracle::random_graph(25, 0.15, seed);
    Matrix feats = Matrix::Random(25, 4);
    for (auto variant : {OperatorVariant::kCentroid, OperatorVariant::kDA, OperatorVariant::kLazyDA,
                         OperatorVariant::kDAD, OperatorVariant::kRenormDAD, OperatorVariant::kRWN,
                         OperatorVariant::kRAN}) {
      const auto op = build_operator(g, variant, seed, &feats);
      for (NodeId i = 0; i < g.num_nodes(); ++i) {
        // Pattern is the sorted neighbor list with i merged in.
        std::vector<NodeId> expect(g.neighbors(i).begin(), g.neighbors(i).end());
        expect.insert(std::lower_bound(expect.begin(), expect.end(), i), i);
        const auto cols = op.row_columns(i);
        CHECK(std::vector<NodeId>(cols.begin(), cols.end()) == expect);
        const bool isolated = g.degree(i) == 0;
        switch (variant) {
          case OperatorVariant::kCentroid:
          case OperatorVariant::kLazyDA: CHECK(std::abs(op.row_sum(i) - 1.0) <= 1e-12); break;
          case OperatorVariant::kDA: CHECK(std::abs(op.row_sum(i) - 2.0) <= 1e-12); break;
          case OperatorVariant::kRAN:
            for (double v : op.row_values(i)) CHECK(v >= 0.0);
            if (!isolated) CHECK(std::abs(op.row_sum(i) - 2.0) <= 1e-12);
            break;
          default: break;
        }
      }
    }
  }
}

TEST_CASE("operator apply agrees with the dense matrix") {
  const auto g = oracle::random_connected_graph(15, 0.2, 5);
  const auto op = build_operator(g, OperatorVariant::kDAD);
  const Matrix x = Matrix::Random(15, 3);
  const Matrix dense = op.to_dense();
  CHECK((op.apply(x) - dense * x).norm() <= 1e-12);
  Matrix t;
  op.apply_transpose(x, t);
  CHECK((t - dense.transpose() * x).norm() <= 1e-12);
  // D^-1/2 A D^-1/2 is symmetric.
  CHECK((dense - dense.transpose()).norm() <= 1e-12);
}

TEST_CASE("operator variant names round trip") {
  for (auto v : {OperatorVariant::kCentroid, OperatorVariant::kDA, OperatorVariant::kDAD,
                 OperatorVariant::kRenormDAD, OperatorVariant::kLazyDA, OperatorVariant::kRWN,
                 OperatorVariant::kRAN}) {
    CHECK(parse_operator_variant(to_string(v)) == v);
  }
  CHECK_THROWS(parse_operator_variant("gcn"));
}
