#include "hetpart/graph.hpp"

#include <algorithm>
#include <sstream>

#include "hetpart/error.hpp"
#include "hetpart/random.hpp"

namespace hetpart {

namespace {

// Iterative Tarjan; returns every node that sits in an SCC of size >= 2.
std::vector<NodeId> nodes_on_cycles(std::size_t n,
                                    const std::vector<std::vector<NodeId>>& adj) {
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<NodeId> stack;
  std::vector<NodeId> result;
  std::size_t counter = 0;

  struct Frame {
    NodeId v;
    std::size_t next;
  };
  std::vector<Frame> call;

  for (NodeId root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;

    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next < adj[f.v].size()) {
        NodeId w = adj[f.v][f.next++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      NodeId v = f.v;
      call.pop_back();
      if (!call.empty()) {
        low[call.back().v] = std::min(low[call.back().v], low[v]);
      }
      if (low[v] == index[v]) {
        std::vector<NodeId> component;
        NodeId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          component.push_back(w);
        } while (w != v);
        if (component.size() > 1) {
          result.insert(result.end(), component.begin(), component.end());
        }
      }
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

}  // namespace

std::string ValidationReport::summary() const {
  std::ostringstream out;
  auto list_edges = [&](const char* label, const std::vector<Edge>& edges) {
    if (edges.empty()) return;
    out << label << ":";
    for (const auto& e : edges) out << " (" << e.src << "," << e.dst << ")";
    out << "; ";
  };
  if (!cycle_nodes.empty()) {
    out << "cycle through nodes:";
    for (auto v : cycle_nodes) out << ' ' << v;
    out << "; ";
  }
  list_edges("self-loops", self_loops);
  list_edges("dangling edges", dangling);
  list_edges("duplicate edges", duplicates);
  return out.str();
}

ValidationReport validate(std::size_t n, std::span<const Edge> edges) {
  ValidationReport report;
  std::vector<Edge> sorted(edges.begin(), edges.end());
  std::sort(sorted.begin(), sorted.end());

  std::vector<std::vector<NodeId>> adj(n);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const Edge& e = sorted[i];
    if (i > 0 && sorted[i - 1] == e) {
      if (report.duplicates.empty() || report.duplicates.back() != e) {
        report.duplicates.push_back(e);
      }
      continue;
    }
    if (e.src >= n || e.dst >= n) {
      report.dangling.push_back(e);
      continue;
    }
    if (e.src == e.dst) {
      report.self_loops.push_back(e);
      continue;
    }
    adj[e.src].push_back(e.dst);
  }
  report.cycle_nodes = nodes_on_cycles(n, adj);
  return report;
}

ValidationReport validate(const Graph& graph) {
  return validate(graph.size(), graph.edges());
}

Graph::Graph(std::vector<std::string> names, std::vector<Edge> edges)
    : names_(std::move(names)), edges_(std::move(edges)) {
  if (names_.empty()) {
    throw Error(errc::kValidation, "graph must have at least one node");
  }
  auto report = validate(names_.size(), edges_);
  if (!report.empty()) {
    throw Error(errc::kValidation, "invalid graph: " + report.summary());
  }
  std::sort(edges_.begin(), edges_.end());
  pred_.resize(names_.size());
  succ_.resize(names_.size());
  for (const auto& e : edges_) {
    succ_[e.src].push_back(e.dst);
    pred_[e.dst].push_back(e.src);
  }
  for (auto& p : pred_) std::sort(p.begin(), p.end());
}

Graph::Graph(std::size_t n, std::vector<Edge> edges)
    : Graph(
          [n] {
            std::vector<std::string> names;
            names.reserve(n);
            for (std::size_t i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
            return names;
          }(),
          std::move(edges)) {}

bool Graph::has_edge(NodeId src, NodeId dst) const {
  return std::binary_search(edges_.begin(), edges_.end(), Edge{src, dst});
}

std::vector<NodeId> Graph::entries() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < size(); ++v)
    if (is_entry(v)) out.push_back(v);
  return out;
}

std::vector<NodeId> Graph::exits() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < size(); ++v)
    if (is_exit(v)) out.push_back(v);
  return out;
}

std::vector<std::size_t> node_depths(const Graph& graph) {
  const std::size_t n = graph.size();
  std::vector<std::size_t> indeg(n), depth(n, 1);
  std::vector<NodeId> ready;
  for (NodeId v = 0; v < n; ++v) {
    indeg[v] = graph.pred(v).size();
    if (indeg[v] == 0) ready.push_back(v);
  }
  while (!ready.empty()) {
    NodeId v = ready.back();
    ready.pop_back();
    for (NodeId c : graph.succ(v)) {
      depth[c] = std::max(depth[c], depth[v] + 1);
      if (--indeg[c] == 0) ready.push_back(c);
    }
  }
  return depth;
}

Graph gen_lstm_grid(std::size_t num_layers, std::size_t seq_len) {
  if (num_layers == 0 || seq_len == 0) {
    throw Error(errc::kArgument, "lstm grid needs at least one layer and one timestep");
  }
  std::vector<std::string> names;
  std::vector<Edge> edges;
  names.reserve(num_layers * seq_len);
  for (std::size_t l = 0; l < num_layers; ++l) {
    for (std::size_t t = 0; t < seq_len; ++t) {
      const NodeId v = l * seq_len + t;
      names.push_back("A_" + std::to_string(t) + "^" + std::to_string(l + 1));
      if (l > 0) edges.push_back({v - seq_len, v});
      if (t > 0) edges.push_back({v - 1, v});
    }
  }
  return Graph(std::move(names), std::move(edges));
}

Graph gen_demo7() {
  enum : NodeId { A, B, C, D, E, F, G };
  return Graph({"A", "B", "C", "D", "E", "F", "G"},
               {{A, E}, {B, E}, {C, F}, {D, F}, {E, G}, {F, G}});
}

Graph gen_random_dag(std::size_t n, double edge_prob, std::uint64_t seed) {
  if (n == 0) throw Error(errc::kArgument, "random dag needs n >= 1");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) {
    throw Error(errc::kArgument, "edge probability must lie in [0, 1]");
  }
  Rng rng(seed);
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (uniform01(rng) < edge_prob) edges.push_back({i, j});
    }
  }
  return Graph(n, std::move(edges));
}

nlohmann::json to_json(const Graph& graph) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : graph.edges()) edges.push_back({e.src, e.dst});
  return {{"n", graph.size()}, {"names", graph.names()}, {"edges", std::move(edges)}};
}

Graph graph_from_json(const nlohmann::json& doc) {
  try {
    for (const char* key : {"n", "names", "edges"}) {
      if (!doc.contains(key)) {
        throw Error(errc::kFormat, std::string("graph json missing \"") + key + "\"");
      }
    }
    const auto n = doc.at("n").get<std::size_t>();
    auto names = doc.at("names").get<std::vector<std::string>>();
    if (names.size() != n) {
      throw Error(errc::kFormat, "graph json: names has " + std::to_string(names.size()) +
                                     " entries, n = " + std::to_string(n));
    }
    std::vector<Edge> edges;
    for (const auto& pair : doc.at("edges")) {
      if (!pair.is_array() || pair.size() != 2) {
        throw Error(errc::kFormat, "graph json: edges must be [src, dst] pairs");
      }
      edges.push_back({pair[0].get<NodeId>(), pair[1].get<NodeId>()});
    }
    return Graph(std::move(names), std::move(edges));
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::kFormat, std::string("graph json: ") + e.what());
  }
}

void save_graph(const Graph& graph, const std::filesystem::path& path) {
  write_text_file_atomic(path, to_json(graph).dump(1) + "\n");
}

Graph load_graph(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(errc::kFormat, path.string() + ": " + e.what());
  }
  return graph_from_json(doc);
}

}  // namespace hetpart
