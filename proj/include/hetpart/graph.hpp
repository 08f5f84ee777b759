#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace hetpart {

using NodeId = std::size_t;

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;

  auto operator<=>(const Edge&) const = default;
};

struct ValidationReport {
  std::vector<NodeId> cycle_nodes;  // members of a non-trivial strongly connected component
  std::vector<Edge> self_loops;
  std::vector<Edge> dangling;       // an endpoint outside [0, n)
  std::vector<Edge> duplicates;     // each repeated edge listed once

  bool empty() const {
    return cycle_nodes.empty() && self_loops.empty() && dangling.empty() &&
           duplicates.empty();
  }
  std::string summary() const;
};

ValidationReport validate(std::size_t n, std::span<const Edge> edges);

// Immutable DAG of kernel vertices. Node indices are dense; names are labels
// only. Edges are kept sorted lexicographically and adjacency lists ascending.
class Graph {
 public:
  // Throws Error(validation) if the edge set is not a valid DAG over the names.
  Graph(std::vector<std::string> names, std::vector<Edge> edges);

  // Names default to "v0", "v1", ...
  Graph(std::size_t n, std::vector<Edge> edges);

  std::size_t size() const { return names_.size(); }
  const std::string& name(NodeId v) const { return names_.at(v); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const NodeId> pred(NodeId v) const { return pred_.at(v); }
  std::span<const NodeId> succ(NodeId v) const { return succ_.at(v); }
  bool is_entry(NodeId v) const { return pred_.at(v).empty(); }
  bool is_exit(NodeId v) const { return succ_.at(v).empty(); }
  bool has_edge(NodeId src, NodeId dst) const;
  std::vector<NodeId> entries() const;
  std::vector<NodeId> exits() const;

  bool operator==(const Graph& other) const {
    return names_ == other.names_ && edges_ == other.edges_;
  }

 private:
  std::vector<std::string> names_;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> pred_;
  std::vector<std::vector<NodeId>> succ_;
};

ValidationReport validate(const Graph& graph);

// Longest path, counted in nodes, from any entry to each node. Entries have depth 1.
std::vector<std::size_t> node_depths(const Graph& graph);

// Unfolded multi-layer RNN: cell (l, t) at index l * seq_len + t depends on
// (l - 1, t) and (l, t - 1). Names are "A_t^l" with 1-based layers.
Graph gen_lstm_grid(std::size_t num_layers, std::size_t seq_len);

// Seven nodes A..G: E <- {A, B}, F <- {C, D}, G <- {E, F}.
Graph gen_demo7();

// Each pair i < j is an edge with probability edge_prob.
Graph gen_random_dag(std::size_t n, double edge_prob, std::uint64_t seed);

nlohmann::json to_json(const Graph& graph);
Graph graph_from_json(const nlohmann::json& doc);
void save_graph(const Graph& graph, const std::filesystem::path& path);
Graph load_graph(const std::filesystem::path& path);

}  // namespace hetpart
