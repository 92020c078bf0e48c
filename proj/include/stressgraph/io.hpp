#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "stressgraph/graph.hpp"
#include "stressgraph/types.hpp"

namespace stressgraph {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::filesystem::path& path, std::size_t line, const std::string& what)
      : std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct LoadedGraph {
  Graph graph;
  BuildStats stats;  // self-loop lines and duplicate edges that were dropped
};

/// Reads a 0-based "u<TAB>v" edge list. Blank lines are skipped; node count
/// is max(id) + 1, or min_nodes if larger.
LoadedGraph load_graph(const std::filesystem::path& path, NodeId min_nodes = 0);
void save_edge_list(const Graph& g, const std::filesystem::path& path);

/// Headerless numeric CSV, one row per node.
Matrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const Matrix& m, const std::filesystem::path& path);

std::vector<std::int32_t> read_labels_csv(const std::filesystem::path& path);

struct NodeDataset {
  Graph graph;
  Matrix features;
  std::vector<std::int32_t> labels;
};

/// Reads edges.tsv, features.csv and labels.csv from one directory and checks
/// that they agree on the node count.
NodeDataset load_node_dataset(const std::filesystem::path& dir);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace stressgraph
