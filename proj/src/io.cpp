#include "stressgraph/io.hpp"

#include <charconv>
#include <fstream>
#include <string_view>

namespace stressgraph {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string_view trim_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view token, T& value) {
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  return ec == std::errc() && ptr == end;
}

}  // namespace

LoadedGraph load_graph(const std::filesystem::path& path, NodeId min_nodes) {
  auto in = open_input(path);
  std::vector<Edge> edges;
  NodeId max_id = -1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim_cr(line);
    if (text.empty()) continue;
    const auto tab = text.find('\t');
    NodeId u = 0;
    NodeId v = 0;
    if (tab == std::string_view::npos || !parse_number(text.substr(0, tab), u) ||
        !parse_number(text.substr(tab + 1), v) || u < 0 || v < 0) {
      throw ParseError(path, line_no, "expected \"u<TAB>v\" with non-negative integer ids");
    }
    edges.push_back({u, v});
    max_id = std::max({max_id, u, v});
  }
  if (edges.empty()) throw ParseError(path, line_no, "edge list is empty");
  LoadedGraph out;
  out.graph = Graph::from_edges(std::max(max_id + 1, min_nodes), edges, &out.stats);
  return out;
}

void save_edge_list(const Graph& g, const std::filesystem::path& path) {
  auto out = open_output(path);
  for (const auto& e : g.edge_list()) out << e.u << '\t' << e.v << '\n';
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, ptr};
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<double> values;
  Eigen::Index cols = -1;
  Eigen::Index rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim_cr(line);
    if (text.empty()) continue;
    Eigen::Index count = 0;
    std::size_t pos = 0;
    while (true) {
      const auto comma = text.find(',', pos);
      const auto token = text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos);
      double v = 0.0;
      if (!parse_number(token, v)) throw ParseError(path, line_no, "not a number: '" + std::string(token) + "'");
      values.push_back(v);
      ++count;
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (cols < 0) cols = count;
    if (count != cols) {
      throw ParseError(path, line_no, "expected " + std::to_string(cols) + " columns, found " +
                                          std::to_string(count));
    }
    ++rows;
  }
  if (rows == 0) throw ParseError(path, line_no, "matrix file is empty");
  return Eigen::Map<Matrix>(values.data(), rows, cols);
}

void write_matrix_csv(const Matrix& m, const std::filesystem::path& path) {
  auto out = open_output(path);
  std::string line;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    line.clear();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) line += ',';
      line += format_double(m(i, j));
    }
    line += '\n';
    out << line;
  }
}

std::vector<std::int32_t> read_labels_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::int32_t> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim_cr(line);
    if (text.empty()) continue;
    std::int32_t v = 0;
    if (!parse_number(text, v)) throw ParseError(path, line_no, "expected one integer label");
    labels.push_back(v);
  }
  if (labels.empty()) throw ParseError(path, line_no, "label file is empty");
  return labels;
}

NodeDataset load_node_dataset(const std::filesystem::path& dir) {
  NodeDataset out;
  out.features = read_matrix_csv(dir / "features.csv");
  out.labels = read_labels_csv(dir / "labels.csv");
  const auto n = static_cast<NodeId>(out.labels.size());
  if (out.features.rows() != n) {
    throw std::runtime_error(dir.string() + ": " + std::to_string(out.features.rows()) + " feature rows but " +
                             std::to_string(n) + " labels");
  }
  out.graph = load_graph(dir / "edges.tsv", n).graph;
  if (out.graph.num_nodes() != n) {
    throw std::runtime_error(dir.string() + ": edge list mentions node ids beyond the label count");
  }
  return out;
}

}  // namespace stressgraph
