#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stressgraph/io.hpp"
#include "stressgraph/layout.hpp"
#include "stressgraph/learn.hpp"
#include "stressgraph/pipelines.hpp"
#include "stressgraph/pivots.hpp"
#include "stressgraph/propagate.hpp"
#include "stressgraph/repulse.hpp"
#include "stressgraph/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace stressgraph;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string config;
  int runs = 1;
};

const std::string kModelDefaults = "Training (model defaults when omitted)";

const std::set<std::string> kGlobalKeys{"seed", "out-dir", "runs"};

fs::path out_path(const Globals& g, const std::string& name) {
  const fs::path p(name);
  if (p.is_absolute()) return p;
  return fs::path(g.out_dir) / p;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::pair<std::int32_t, std::int32_t> parse_dims(const std::string& text, const char* what) {
  const auto x = text.find('x');
  std::int32_t a = 0;
  std::int32_t b = 0;
  const char* end = text.data() + text.size();
  if (x == std::string::npos || std::from_chars(text.data(), text.data() + x, a).ptr != text.data() + x ||
      std::from_chars(text.data() + x + 1, end, b).ptr != end || a < 1 || b < 1) {
    throw std::invalid_argument(std::string(what) + " must look like AxB with positive integers, got '" + text + "'");
  }
  return {a, b};
}

// Config values become command-line tokens for every option the command line
// does not already set, so explicit flags always win.
std::vector<std::string> inject_config(const std::vector<std::string>& args, const std::set<std::string>& commands) {
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  if (config_path.empty()) return args;
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open config file " + config_path);
  const json cfg = json::parse(in);
  if (!cfg.is_object()) throw std::runtime_error("config file must hold a JSON object");

  std::string command;
  for (const auto& a : args) {
    if (commands.count(a)) {
      command = a;
      break;
    }
  }
  auto given = [&](const std::string& key) {
    for (const auto& a : args) {
      if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
    }
    return false;
  };
  std::vector<std::string> globals;
  std::vector<std::string> locals;
  auto add = [&](std::string key, const json& value) {
    std::replace(key.begin(), key.end(), '_', '-');
    if (given(key)) return;
    auto& into = kGlobalKeys.count(key) ? globals : locals;
    if (value.is_boolean()) {
      if (value.get<bool>()) into.push_back("--" + key);
      return;
    }
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_array()) {
      for (const auto& item : value) {
        if (!text.empty()) text += ",";
        text += item.is_string() ? item.get<std::string>() : item.dump();
      }
    } else {
      text = value.dump();
    }
    into.push_back("--" + key);
    into.push_back(text);
  };
  for (const auto& [key, value] : cfg.items()) {
    if (commands.count(key)) {
      if (key != command) continue;
      for (const auto& [k, v] : value.items()) add(k, v);
    } else {
      add(key, value);
    }
  }
  std::vector<std::string> out{args.front()};
  out.insert(out.end(), globals.begin(), globals.end());
  out.insert(out.end(), args.begin() + 1, args.end());
  out.insert(out.end(), locals.begin(), locals.end());
  return out;
}

json typed(const std::string& text) {
  long long i = 0;
  const auto [iptr, iec] = std::from_chars(text.data(), text.data() + text.size(), i);
  if (!text.empty() && iec == std::errc() && iptr == text.data() + text.size()) return i;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (!text.empty() && ec == std::errc() && ptr == text.data() + text.size()) return v;
  return text;
}

json resolved_config(const CLI::App& app, const CLI::App& sub) {
  json out;
  out["command"] = sub.get_name();
  for (const CLI::App* level : {&app, &sub}) {
    for (const CLI::Option* opt : level->get_options()) {
      const std::string name = opt->get_lnames().empty() ? opt->get_name() : opt->get_lnames().front();
      if (name == "help" || name == "config") continue;
      if (opt->get_group() == kModelDefaults && opt->count() == 0) continue;
      if (opt->get_type_size() == 0) {
        out[name] = opt->count() > 0;
      } else if (opt->count() > 0) {
        const auto& results = opt->results();
        std::string joined;
        for (const auto& r : results) joined += (joined.empty() ? "" : ",") + r;
        out[name] = typed(joined);
      } else if (!opt->get_default_str().empty()) {
        out[name] = typed(opt->get_default_str());
      }
    }
  }
  return out;
}

Matrix load_or_make_features(NodeId n, const std::string& path, int random_dims, std::uint64_t seed) {
  if (!path.empty()) {
    Matrix x = read_matrix_csv(path);
    if (x.rows() != n) throw std::runtime_error("feature file has " + std::to_string(x.rows()) + " rows, graph has " +
                                                std::to_string(n) + " nodes");
    return x;
  }
  if (random_dims > 0) return random_features(n, random_dims, seed);
  return Matrix::Ones(n, 1);
}

Matrix apply_norm(const Matrix& x, const std::string& norm) {
  if (norm == "l1") return row_normalize_l1(x);
  if (norm == "l2") return row_normalize_l2(x);
  return x;
}

json hyperparameters(const TrainConfig& c) {
  return {{"lr", c.lr},         {"epochs", c.epochs}, {"weight_decay", c.weight_decay}, {"momentum", c.momentum},
          {"hidden", c.hidden}, {"patience", c.patience}, {"alpha", c.alpha},       {"k", c.k}};
}

json report_json(const MetricsReport& r) { return json::parse(r.to_json(false)); }

// Per-run report files keep timing; the summary line does not, so reruns
// print identical bytes.
void save_report(const Globals& g, const std::string& file, const MetricsReport& r) {
  write_text(out_path(g, file), r.to_json(true) + "\n");
}

struct TrainFlags {
  CLI::Option* lr = nullptr;
  CLI::Option* epochs = nullptr;
  CLI::Option* weight_decay = nullptr;
  CLI::Option* momentum = nullptr;
  CLI::Option* hidden = nullptr;
  CLI::Option* patience = nullptr;
  double lr_v = 0.0;
  int epochs_v = 0;
  double wd_v = 0.0;
  double momentum_v = 0.0;
  int hidden_v = 0;
  int patience_v = 0;

  void add(CLI::App* sub) {
    lr = sub->add_option("--lr", lr_v, "learning rate");
    epochs = sub->add_option("--epochs", epochs_v, "maximum epochs");
    weight_decay = sub->add_option("--weight-decay", wd_v, "L2 penalty on weights");
    momentum = sub->add_option("--momentum", momentum_v, "gradient descent momentum");
    hidden = sub->add_option("--hidden", hidden_v, "hidden width");
    patience = sub->add_option("--patience", patience_v, "early-stop patience in epochs");
    for (auto* o : {lr, epochs, weight_decay, momentum, hidden, patience}) o->group(kModelDefaults)->default_str("");
  }
  TrainConfig apply(TrainConfig cfg) const {
    if (lr->count()) cfg.lr = lr_v;
    if (epochs->count()) cfg.epochs = epochs_v;
    if (weight_decay->count()) cfg.weight_decay = wd_v;
    if (momentum->count()) cfg.momentum = momentum_v;
    if (hidden->count()) cfg.hidden = hidden_v;
    if (patience->count()) cfg.patience = patience_v;
    return cfg;
  }
};

struct EmbedFlags {
  std::string embed = "e";
  std::int32_t pivots = 64;
  Hop cutoff = 2;
  std::string combine = "none";
  std::string aggregate = "per-pivot";
  double anchor_c = 0.5;

  void add(CLI::App* sub) {
    sub->add_option("--embed", embed, "e, f, r, anchor, or local:<operator>[:<k>]");
    sub->add_option("--pivots", pivots, "pivot count for e/f/r");
    sub->add_option("--cutoff", cutoff, "hop cutoff for f");
    sub->add_option("--combine", combine, "concat, product or none")->check(CLI::IsMember({"concat", "product", "none"}));
    sub->add_option("--aggregate", aggregate, "per-pivot or sum")->check(CLI::IsMember({"per-pivot", "sum"}));
    sub->add_option("--anchor-c", anchor_c, "anchor set repetition factor");
  }
  EmbedSpec spec(std::uint64_t seed) const {
    EmbedSpec s = parse_embed_spec(embed);
    s.pivots = pivots;
    s.repulsive.cutoff = cutoff;
    s.repulsive.combine = parse_combine(combine);
    s.repulsive.aggregate = parse_pivot_aggregate(aggregate);
    s.anchor_c = anchor_c;
    s.seed = seed;
    return s;
  }
};

fs::path default_dataset() { return fs::path(STRESSGRAPH_DATA_DIR) / "cora"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stress-based graph layout, propagation and learning experiments"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "base random seed");
  app.add_option("--out-dir", g.out_dir, "directory for artifacts");
  app.add_option("--config", g.config, "JSON file of flag values; explicit flags win");
  app.add_option("--runs", g.runs, "repetitions with seeds seed .. seed+runs-1")->check(CLI::PositiveNumber);

  json summary;
  std::map<CLI::App*, std::function<void()>> actions;

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic graph");
  std::string grid_dims;
  std::string caveman_dims;
  double rewire = 0.01;
  std::string synth_out;
  std::string communities_out;
  synth->add_option("--grid", grid_dims, "WxH lattice");
  synth->add_option("--caveman", caveman_dims, "CxS: C cliques of S nodes");
  synth->add_option("--rewire", rewire, "fraction of caveman edges rewired");
  synth->add_option("--out", synth_out, "edge list path")->required();
  synth->add_option("--communities-out", communities_out, "caveman community labels CSV");
  actions[synth] = [&] {
    if (grid_dims.empty() == caveman_dims.empty()) throw std::invalid_argument("give exactly one of --grid, --caveman");
    Graph graph;
    if (!grid_dims.empty()) {
      const auto [w, h] = parse_dims(grid_dims, "--grid");
      graph = synth_grid(w, h);
    } else {
      const auto [c, s] = parse_dims(caveman_dims, "--caveman");
      auto cave = synth_caveman(c, s, rewire, g.seed);
      graph = std::move(cave.graph);
      if (!communities_out.empty()) {
        std::string text;
        for (auto v : cave.community) text += std::to_string(v) + "\n";
        write_text(out_path(g, communities_out), text);
      }
    }
    const auto path = out_path(g, synth_out);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    save_edge_list(graph, path);
    summary = {{"command", "synth"}, {"nodes", graph.num_nodes()}, {"edges", graph.num_edges()},
               {"out", path.string()}};
  };

  // layout
  auto* layout = app.add_subcommand("layout", "stress majorization layout");
  std::string layout_graph;
  std::string mode = "full";
  std::int32_t layout_pivots = 50;
  double theta = -1.0;
  std::int32_t augment = 0;
  std::string virtual_weight = "unit";
  int max_iters = 500;
  double tol = 1e-6;
  int dims = 2;
  std::string svg_out;
  std::string positions_out;
  std::string trace_out = "layout_trace.json";
  layout->add_option("--graph", layout_graph, "edge list")->required();
  layout->add_option("--mode", mode, "binary, full or sparse")->check(CLI::IsMember({"binary", "full", "sparse"}));
  layout->add_option("--pivots", layout_pivots, "maxmin pivots for sparse mode");
  layout->add_option("--theta", theta, "binary-mode balance; negative picks 0.1|E|/n^2");
  layout->add_option("--augment-pivots", augment, "add this many virtual pivot nodes first");
  layout->add_option("--virtual-weight", virtual_weight, "virtual edge weight: unit or mean")->check(CLI::IsMember({"unit", "mean"}));
  layout->add_option("--max-iters", max_iters, "iteration cap");
  layout->add_option("--tol", tol, "relative energy change to stop at");
  layout->add_option("--dims", dims, "layout dimensions");
  layout->add_option("--svg", svg_out, "SVG drawing (2 dimensions only)");
  layout->add_option("--positions", positions_out, "positions CSV");
  layout->add_option("--trace", trace_out, "energy trace JSON");
  actions[layout] = [&] {
    Graph graph = load_graph(layout_graph).graph;
    if (virtual_weight != "mean" && virtual_weight != "unit") {
      throw std::invalid_argument("--virtual-weight must be unit or mean");
    }
    if (augment > 0) {
      const auto ps = select_pivots_maxmin(graph, augment, g.seed, !graph.is_connected());
      graph = augment_with_pivots(graph, ps,
                                  virtual_weight == "mean" ? VirtualEdgeWeight::kMean : VirtualEdgeWeight::kUnit);
    }
    const StressMode m = parse_stress_mode(mode);
    StressProblem prob = m == StressMode::kFull     ? StressProblem::full(graph)
                         : m == StressMode::kBinary ? StressProblem::binary(graph, theta < 0 ? default_theta(graph) : theta)
                                                    : StressProblem::sparse(graph, select_pivots_maxmin(graph, layout_pivots, g.seed));
    prob.max_iters = max_iters;
    prob.tol = tol;
    LayoutInit init;
    init.seed = g.seed;
    init.dims = dims;
    const Layout result = solve_layout(prob, init);
    bool monotone = true;
    for (std::size_t i = 1; i < result.energy_trace.size(); ++i) {
      const double prev = result.energy_trace[i - 1];
      monotone = monotone && result.energy_trace[i] <= prev + 1e-9 * std::max(1.0, prev);
    }
    json trace{{"mode", mode}, {"iterations", result.iteration_count}, {"energy", result.energy_trace}};
    write_text(out_path(g, trace_out), trace.dump() + "\n");
    if (!svg_out.empty()) export_svg(result.positions, graph, out_path(g, svg_out));
    if (!positions_out.empty()) write_matrix_csv(result.positions, out_path(g, positions_out));
    summary = {{"command", "layout"},
               {"mode", mode},
               {"nodes", graph.num_nodes()},
               {"iterations", result.iteration_count},
               {"energy", result.energy_trace.back()},
               {"normalized_stress", normalized_stress(result.positions, prob)},
               {"monotone", monotone},
               {"trace", out_path(g, trace_out).string()}};
  };

  // pivots
  auto* pivots = app.add_subcommand("pivots", "select pivots or anchor sets");
  std::string pivots_graph;
  std::int32_t pivot_count = 50;
  std::string strategy = "maxmin";
  double pivots_anchor_c = 0.5;
  bool per_component = false;
  std::string pivots_out = "pivots.json";
  pivots->add_option("--graph", pivots_graph, "edge list")->required();
  pivots->add_option("--count", pivot_count, "maxmin pivot count");
  pivots->add_option("--strategy", strategy, "maxmin or anchor")->check(CLI::IsMember({"maxmin", "anchor"}));
  pivots->add_option("--anchor-c", pivots_anchor_c, "anchor set repetition factor");
  pivots->add_flag("--per-component", per_component, "allow disconnected graphs for maxmin");
  pivots->add_option("--out", pivots_out, "output JSON");
  actions[pivots] = [&] {
    const Graph graph = load_graph(pivots_graph).graph;
    json out;
    if (strategy == "maxmin") {
      const auto ps = select_pivots_maxmin(graph, pivot_count, g.seed, per_component);
      out = {{"strategy", strategy}, {"pivots", ps.pivots}, {"region", ps.region}};
      summary = {{"command", "pivots"}, {"strategy", strategy}, {"count", ps.size()}};
    } else if (strategy == "anchor") {
      const auto anchors = select_anchor_sets(graph, pivots_anchor_c, g.seed);
      out = {{"strategy", strategy}, {"sets", anchors.sets}};
      summary = {{"command", "pivots"}, {"strategy", strategy}, {"count", anchors.num_sets()}};
    } else {
      throw std::invalid_argument("--strategy must be maxmin or anchor");
    }
    write_text(out_path(g, pivots_out), out.dump() + "\n");
    summary["out"] = out_path(g, pivots_out).string();
  };

  // propagate
  auto* propagate = app.add_subcommand("propagate", "propagate node features");
  std::string prop_graph;
  std::string prop_features;
  int prop_random = 0;
  std::string prop_norm = "none";
  std::string prop_operator = "da";
  std::string prop_model = "linear";
  PropagationConfig pcfg;
  double prop_eps = 1e-3;
  std::string prop_out = "propagated.csv";
  propagate->add_option("--graph", prop_graph, "edge list")->required();
  propagate->add_option("--features", prop_features, "feature CSV (constant 1 when absent)");
  propagate->add_option("--random-features", prop_random, "seeded standard normal features of this width");
  propagate->add_option("--feature-norm", prop_norm, "none, l1 or l2 row normalization")->check(CLI::IsMember({"none", "l1", "l2"}));
  propagate->add_option("--operator", prop_operator, "centroid, da, dad, renorm-dad, lazy-da, rwn, ran");
  propagate->add_option("--model", prop_model, "linear, stress or simplified")->check(CLI::IsMember({"linear", "stress", "simplified"}));
  propagate->add_option("--k", pcfg.k, "steps");
  propagate->add_option("--alpha", pcfg.alpha, "initial-feature share for simplified");
  propagate->add_option("--beta", pcfg.beta, "target distance exponent for stress");
  propagate->add_option("--z", pcfg.z, "frozen reference depth for stress");
  propagate->add_flag("--normalize", pcfg.normalize_each_step, "rescale to unit max-abs each step");
  propagate->add_flag("--allow-divergent", pcfg.allow_divergent, "permit DA/DAD in simplified");
  propagate->add_option("--eps", prop_eps, "indiscernibility threshold");
  propagate->add_option("--out", prop_out, "output CSV");
  actions[propagate] = [&] {
    const Graph graph = load_graph(prop_graph).graph;
    const Matrix x = apply_norm(load_or_make_features(graph.num_nodes(), prop_features, prop_random, g.seed), prop_norm);
    const Operator op = build_operator(graph, parse_operator_variant(prop_operator), g.seed, &x);
    Matrix y;
    if (prop_model == "linear") {
      y = propagate_linear(op, x, pcfg.k, pcfg.normalize_each_step).x;
    } else if (prop_model == "stress") {
      y = stress_propagate(op, x, pcfg);
    } else if (prop_model == "simplified") {
      y = simplified_stress_propagate(op, x, pcfg);
    } else {
      throw std::invalid_argument("--model must be linear, stress or simplified");
    }
    write_matrix_csv(y, out_path(g, prop_out));
    const auto ind = indiscernibility(y, prop_eps);
    summary = {{"command", "propagate"},           {"rows", y.rows()},
               {"cols", y.cols()},                 {"node_indiscernibility", ind.node_fraction},
               {"feature_indiscernibility", ind.feature_fraction}, {"out", out_path(g, prop_out).string()}};
  };

  // embed-repulsive
  auto* embed = app.add_subcommand("embed-repulsive", "pivot or anchor position embeddings");
  std::string embed_graph_path;
  std::string embed_variant = "e";
  std::string embed_features;
  std::string embed_out = "repulsive.csv";
  EmbedFlags embed_flags;
  embed->add_option("--graph", embed_graph_path, "edge list")->required();
  embed->add_option("--variant", embed_variant, "e, f, r or anchor")->check(CLI::IsMember({"e", "f", "r", "anchor"}));
  embed->add_option("--pivots", embed_flags.pivots, "pivot count");
  embed->add_option("--cutoff", embed_flags.cutoff, "hop cutoff for f");
  embed->add_option("--combine", embed_flags.combine, "concat, product or none")->check(CLI::IsMember({"concat", "product", "none"}));
  embed->add_option("--aggregate", embed_flags.aggregate, "per-pivot or sum")->check(CLI::IsMember({"per-pivot", "sum"}));
  embed->add_option("--anchor-c", embed_flags.anchor_c, "anchor set repetition factor");
  embed->add_option("--features", embed_features, "feature CSV (constant 1 when absent)");
  embed->add_option("--out", embed_out, "output CSV");
  actions[embed] = [&] {
    const Graph graph = load_graph(embed_graph_path).graph;
    const Matrix x = load_or_make_features(graph.num_nodes(), embed_features, 0, g.seed);
    embed_flags.embed = embed_variant;
    const EmbedSpec spec = embed_flags.spec(g.seed);
    if (spec.kind == EmbedKind::kLocal) throw std::invalid_argument("--variant must be e, f, r or anchor");
    const Matrix y = embed_graph(graph, spec, x);
    write_matrix_csv(y, out_path(g, embed_out));
    summary = {{"command", "embed-repulsive"}, {"variant", embed_variant}, {"rows", y.rows()},
               {"cols", y.cols()},             {"out", out_path(g, embed_out).string()}};
  };

  // train-node
  auto* train_node = app.add_subcommand("train-node", "node classification: probe or deep network");
  std::string node_dataset = default_dataset().string();
  std::string node_model = "probe";
  std::string node_operator = "renorm-dad";
  std::string node_family = "initial-residual";
  int node_k = 0;
  std::string node_ks;
  double node_alpha = 0.1;
  std::string node_norm = "auto";
  std::int32_t per_class = 20;
  std::int32_t num_val = 500;
  std::int32_t num_test = 1000;
  std::string node_out = "train-node.json";
  TrainFlags node_train;
  train_node->add_option("--dataset", node_dataset, "directory with edges.tsv, features.csv, labels.csv");
  train_node->add_option("--model", node_model, "probe or stressgcn")->check(CLI::IsMember({"probe", "stressgcn"}));
  train_node->add_option("--operator", node_operator, "propagation operator");
  train_node->add_option("--family", node_family, "probe features: plain or initial-residual")->check(CLI::IsMember({"plain", "initial-residual"}));
  train_node->add_option("--k", node_k, "propagation depth");
  train_node->add_option("--ks", node_ks, "probe depth sweep, e.g. 0,1,2,4 or 0:64:8");
  train_node->add_option("--alpha", node_alpha, "initial-feature share");
  train_node->add_option("--feature-norm", node_norm, "auto, none, l1 or l2")->check(CLI::IsMember({"auto", "none", "l1", "l2"}));
  train_node->add_option("--per-class", per_class, "training nodes per class");
  train_node->add_option("--val", num_val, "validation nodes");
  train_node->add_option("--test", num_test, "test nodes");
  train_node->add_option("--out", node_out, "metrics JSON");
  node_train.add(train_node);
  actions[train_node] = [&] {
    const NodeDataset ds = load_node_dataset(node_dataset);
    const bool gcn = node_model == "stressgcn";
    if (!gcn && node_model != "probe") throw std::invalid_argument("--model must be probe or stressgcn");
    const std::string norm = node_norm == "auto" ? (gcn ? "none" : "l1") : node_norm;
    const Matrix x = apply_norm(ds.features, norm);
    const Operator op = build_operator(ds.graph, parse_operator_variant(node_operator), g.seed, &x);
    TrainConfig cfg = node_train.apply(gcn ? stressgcn_defaults() : probe_defaults());
    cfg.alpha = node_alpha;
    cfg.k = node_k;
    std::vector<NodeSplit> splits;
    for (int r = 0; r < g.runs; ++r) {
      splits.push_back(planetoid_split(ds.labels, per_class, num_val, num_test, g.seed + static_cast<std::uint64_t>(r)));
    }
    MetricsReport report;
    if (gcn) {
      std::vector<MetricsReport> parts;
      for (int r = 0; r < g.runs; ++r) {
        cfg.seed = g.seed + static_cast<std::uint64_t>(r);
        parts.push_back(train_stressgcn(op, x, ds.labels, splits[static_cast<std::size_t>(r)], cfg));
      }
      report = merge_reports(parts);
    } else {
      const std::vector<int> ks = node_ks.empty() ? std::vector<int>{node_k} : parse_int_list(node_ks);
      report = depth_sweep(op, parse_propagation_family(node_family), x, ds.labels, splits, ks, cfg);
      if (node_ks.empty()) report.per_depth.clear();
    }
    save_report(g, node_out, report);
    summary = {{"command", "train-node"}, {"model", node_model}, {"report", report_json(report)},
               {"out", out_path(g, node_out).string()}};
    summary["hyperparameters"] = hyperparameters(cfg);
  };

  // train-link
  auto* train_link = app.add_subcommand("train-link", "link prediction with a bilinear head");
  std::string link_graph;
  std::string link_synth;
  double val_frac = 0.1;
  double test_frac = 0.1;
  std::string link_out = "train-link.json";
  EmbedFlags link_embed;
  TrainFlags link_train;
  train_link->add_option("--graph", link_graph, "edge list");
  train_link->add_option("--synth", link_synth, "com1 (caveman 20x20, 1% rewired, reseeded per run) or grid1 (20x20)")->check(CLI::IsMember({"com1", "grid1"}));
  train_link->add_option("--val-frac", val_frac, "validation share of edges");
  train_link->add_option("--test-frac", test_frac, "test share of edges");
  train_link->add_option("--out", link_out, "metrics JSON");
  link_embed.add(train_link);
  link_train.add(train_link);
  actions[train_link] = [&] {
    if (link_graph.empty() == link_synth.empty()) throw std::invalid_argument("give exactly one of --graph, --synth");
    if (!link_synth.empty() && link_synth != "com1" && link_synth != "grid1") {
      throw std::invalid_argument("--synth must be com1 or grid1");
    }
    std::optional<Graph> fixed;
    if (!link_graph.empty()) fixed = load_graph(link_graph).graph;
    std::vector<MetricsReport> parts;
    for (int r = 0; r < g.runs; ++r) {
      const std::uint64_t seed = g.seed + static_cast<std::uint64_t>(r);
      const Graph graph = fixed ? *fixed : link_synth == "com1" ? synth_caveman(20, 20, 0.01, seed).graph : synth_grid(20, 20);
      const LinkSplit split = split_links(graph, val_frac, test_frac, seed);
      TrainConfig cfg = link_train.apply(link_defaults());
      cfg.seed = seed;
      parts.push_back(train_link_model(make_embed_fn(link_embed.spec(seed)), split, cfg));
    }
    const MetricsReport report = merge_reports(parts);
    save_report(g, link_out, report);
    summary = {{"command", "train-link"}, {"embed", link_embed.embed}, {"report", report_json(report)},
               {"out", out_path(g, link_out).string()}};
    summary["hyperparameters"] = hyperparameters(link_train.apply(link_defaults()));
  };

  // train-pair
  auto* train_pair = app.add_subcommand("train-pair", "same-community pair classification");
  std::string pair_graph;
  std::string pair_communities;
  std::string pair_synth;
  double pair_rewire = 0.01;
  std::string pair_out = "train-pair.json";
  EmbedFlags pair_embed;
  TrainFlags pair_train;
  train_pair->add_option("--graph", pair_graph, "edge list");
  train_pair->add_option("--communities", pair_communities, "community label CSV for --graph");
  train_pair->add_option("--synth", pair_synth, "CxS caveman graph, reseeded per run");
  train_pair->add_option("--rewire", pair_rewire, "caveman rewiring fraction");
  train_pair->add_option("--out", pair_out, "metrics JSON");
  pair_embed.add(train_pair);
  pair_train.add(train_pair);
  actions[train_pair] = [&] {
    if (pair_graph.empty() == pair_synth.empty()) throw std::invalid_argument("give exactly one of --graph, --synth");
    std::vector<MetricsReport> parts;
    for (int r = 0; r < g.runs; ++r) {
      const std::uint64_t seed = g.seed + static_cast<std::uint64_t>(r);
      Graph graph;
      std::vector<std::int32_t> community;
      if (!pair_synth.empty()) {
        const auto [c, s] = parse_dims(pair_synth, "--synth");
        auto cave = synth_caveman(c, s, pair_rewire, seed);
        graph = std::move(cave.graph);
        community = std::move(cave.community);
      } else {
        if (pair_communities.empty()) throw std::invalid_argument("--graph needs --communities");
        community = read_labels_csv(pair_communities);
        graph = load_graph(pair_graph, static_cast<NodeId>(community.size())).graph;
      }
      TrainConfig cfg = pair_train.apply(link_defaults());
      cfg.seed = seed;
      parts.push_back(train_pair_model(embed_graph(graph, pair_embed.spec(seed)), community, cfg));
    }
    const MetricsReport report = merge_reports(parts);
    save_report(g, pair_out, report);
    summary = {{"command", "train-pair"}, {"embed", pair_embed.embed}, {"report", report_json(report)},
               {"out", out_path(g, pair_out).string()}};
    summary["hyperparameters"] = hyperparameters(pair_train.apply(link_defaults()));
  };

  // diagnose
  auto* diagnose = app.add_subcommand("diagnose", "accuracy and indiscernibility against depth");
  std::string diag_dataset = default_dataset().string();
  std::string diag_model = "da";
  std::string diag_family = "plain";
  int diag_random = 0;
  std::string diag_ks = "0,1,2,4,8,16,32,64";
  double diag_eps = 1e-3;
  double diag_alpha = 0.1;
  std::string diag_norm = "none";
  std::string diag_out = "diagnose.json";
  TrainFlags diag_train;
  diagnose->add_option("--dataset", diag_dataset, "directory with edges.tsv, features.csv, labels.csv");
  diagnose->add_option("--model", diag_model, "propagation operator");
  diagnose->add_option("--family", diag_family, "plain or initial-residual")->check(CLI::IsMember({"plain", "initial-residual"}));
  diagnose->add_option("--alpha", diag_alpha, "initial-feature share for initial-residual");
  diagnose->add_option("--random-features", diag_random, "replace features by seeded normals of this width");
  diagnose->add_option("--ks", diag_ks, "depths, e.g. 0,1,...,1000 or 0:1000:10");
  diagnose->add_option("--eps", diag_eps, "indiscernibility threshold");
  diagnose->add_option("--feature-norm", diag_norm, "none, l1 or l2")->check(CLI::IsMember({"none", "l1", "l2"}));
  diagnose->add_option("--out", diag_out, "diagnosis JSON");
  diag_train.add(diagnose);
  actions[diagnose] = [&] {
    const NodeDataset ds = load_node_dataset(diag_dataset);
    const Matrix x = apply_norm(
        diag_random > 0 ? random_features(ds.graph.num_nodes(), diag_random, g.seed) : ds.features, diag_norm);
    const Operator op = build_operator(ds.graph, parse_operator_variant(diag_model), g.seed, &x);
    std::vector<NodeSplit> splits;
    for (int r = 0; r < g.runs; ++r) {
      splits.push_back(planetoid_split(ds.labels, 20, 500, 1000, g.seed + static_cast<std::uint64_t>(r)));
    }
    TrainConfig cfg = diag_train.apply(probe_defaults());
    cfg.alpha = diag_alpha;
    const auto ks = parse_int_list(diag_ks);
    std::vector<Indiscernibility> ind;
    const auto report = depth_sweep(op, parse_propagation_family(diag_family), x, ds.labels, splits, ks, cfg,
                                    [&](int, const Matrix& cur) { ind.push_back(indiscernibility(cur, diag_eps)); });
    json depths = json::array();
    for (std::size_t i = 0; i < report.per_depth.size(); ++i) {
      const auto& p = report.per_depth[i];
      depths.push_back({{"depth", p.depth},
                        {"accuracy", p.mean()},
                        {"accuracy_std", p.std()},
                        {"node_indiscernibility", ind[i].node_fraction},
                        {"feature_indiscernibility", ind[i].feature_fraction}});
    }
    std::vector<std::int64_t> counts;
    for (auto y : ds.labels) {
      if (static_cast<std::size_t>(y) >= counts.size()) counts.resize(static_cast<std::size_t>(y) + 1, 0);
      ++counts[static_cast<std::size_t>(y)];
    }
    const double majority = static_cast<double>(*std::max_element(counts.begin(), counts.end())) /
                            static_cast<double>(ds.labels.size());
    json out{{"model", diag_model}, {"family", diag_family}, {"majority_rate", majority}, {"per_depth", depths}};
    write_text(out_path(g, diag_out), out.dump() + "\n");
    summary = {{"command", "diagnose"}, {"depths", depths.size()}, {"majority_rate", majority},
               {"out", out_path(g, diag_out).string()}};
    summary["hyperparameters"] = hyperparameters(cfg);
  };

  std::set<std::string> commands;
  for (const auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) commands.insert(sub->get_name());

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = inject_config(args, commands);
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  CLI::App* sub = app.get_subcommands().front();
  try {
    const json resolved = resolved_config(app, *sub);
    std::cerr << "config " << resolved.dump() << "\n";
    write_text(out_path(g, sub->get_name() + "_config.json"), resolved.dump(2) + "\n");
    actions.at(sub)();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << summary.dump() << std::endl;
  return 0;
}
