#include "stressgraph/pipelines.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

#include "stressgraph/pivots.hpp"
#include "stressgraph/propagate.hpp"
#include "stressgraph/random.hpp"

namespace stressgraph {

Matrix random_features(NodeId n, int d, std::uint64_t seed) {
  if (n < 0 || d < 1) throw std::invalid_argument("random features need n >= 0 and d >= 1");
  Rng rng(seed);
  Matrix x(n, d);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.normal();
  return x;
}

namespace {

std::vector<std::string> split_on(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto at = text.find(sep, start);
    out.push_back(text.substr(start, at == std::string::npos ? std::string::npos : at - start));
    if (at == std::string::npos) break;
    start = at + 1;
  }
  return out;
}

int to_int(const std::string& s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

}  // namespace

EmbedSpec parse_embed_spec(const std::string& text) {
  EmbedSpec spec;
  const auto parts = split_on(text, ':');
  if (parts[0] == "anchor") {
    spec.kind = EmbedKind::kAnchor;
  } else if (parts[0] == "local") {
    spec.kind = EmbedKind::kLocal;
    if (parts.size() > 1) spec.local_operator = parse_operator_variant(parts[1]);
    if (parts.size() > 2) spec.local_k = to_int(parts[2]);
    if (parts.size() > 3 || spec.local_k < 0) throw std::invalid_argument("bad local embedding '" + text + "'");
    return spec;
  } else {
    spec.repulsive.variant = parse_repulsive_variant(parts[0]);
  }
  if (parts.size() > 1) throw std::invalid_argument("unexpected suffix in embedding '" + text + "'");
  return spec;
}

std::string to_string(const EmbedSpec& spec) {
  switch (spec.kind) {
    case EmbedKind::kRepulsive:
      return std::string(to_string(spec.repulsive.variant));
    case EmbedKind::kAnchor:
      return "anchor";
    case EmbedKind::kLocal:
      return "local:" + std::string(to_string(spec.local_operator)) + ":" + std::to_string(spec.local_k);
  }
  return "?";
}

Matrix embed_graph(const Graph& g, const EmbedSpec& spec, const Matrix& x_given) {
  const NodeId n = g.num_nodes();
  const Matrix x = x_given.size() == 0 ? Matrix::Ones(n, 1) : x_given;
  if (x.rows() != n) throw std::invalid_argument("features must have one row per node");
  switch (spec.kind) {
    case EmbedKind::kRepulsive: {
      const bool connected = g.is_connected();
      const auto ps = select_pivots_maxmin(g, std::min(spec.pivots, n), spec.seed, !connected);
      RepulsiveConfig cfg = spec.repulsive;
      if (cfg.variant == RepulsiveVariant::kExact && !connected) {
        cfg.variant = RepulsiveVariant::kTruncated;
        cfg.cutoff = n;
      }
      if (cfg.variant == RepulsiveVariant::kTruncated) return repulsive_embed_truncated(g, ps.pivots, x, cfg);
      return repulsive_embed(ps, x, cfg);
    }
    case EmbedKind::kAnchor:
      return anchor_position_features(select_anchor_sets(g, spec.anchor_c, spec.seed), x);
    case EmbedKind::kLocal: {
      const Operator op = build_operator(g, spec.local_operator, spec.seed, &x);
      return propagate_linear(op, x, spec.local_k, false).x;
    }
  }
  return x;
}

EmbedFn make_embed_fn(const EmbedSpec& spec) {
  return [spec](const Graph& g) { return embed_graph(g, spec); };
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  if (text.find(',') == std::string::npos && text.find(':') != std::string::npos) {
    const auto parts = split_on(text, ':');
    if (parts.size() > 3) throw std::invalid_argument("range must be lo:hi or lo:hi:step");
    const int lo = to_int(parts[0]);
    const int hi = to_int(parts[1]);
    const int step = parts.size() == 3 ? to_int(parts[2]) : 1;
    if (step < 1 || hi < lo) throw std::invalid_argument("bad range '" + text + "'");
    for (int v = lo; v <= hi; v += step) out.push_back(v);
    return out;
  }
  const auto parts = split_on(text, ',');
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] != "...") {
      out.push_back(to_int(parts[i]));
      continue;
    }
    if (out.size() < 2 || i + 1 != parts.size() - 1) {
      throw std::invalid_argument("'...' needs two entries before it and one after");
    }
    const int step = out[out.size() - 1] - out[out.size() - 2];
    const int hi = to_int(parts[i + 1]);
    if (step < 1) throw std::invalid_argument("'...' needs an increasing list");
    for (int v = out.back() + step; v < hi; v += step) out.push_back(v);
  }
  return out;
}

}  // namespace stressgraph
