#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "hetpart/cost_model.hpp"
#include "hetpart/engine.hpp"
#include "hetpart/graph.hpp"
#include "hetpart/plan.hpp"
#include "hetpart/random.hpp"

namespace testsupport {

using namespace hetpart;

struct Instance {
  Graph graph;
  CostModel cm;
};

inline Instance random_instance(Rng& rng, std::size_t max_nodes, int max_cores) {
  const auto n = static_cast<std::size_t>(uniform_int(rng, 1, max_nodes));
  const double p = uniform(rng, 0.05, 0.6);
  Graph graph = gen_random_dag(n, p, rng());
  ProfileParams params;
  params.max_cores = static_cast<int>(uniform_int(rng, 1, static_cast<std::uint64_t>(max_cores)));
  params.gpu_mean = uniform(rng, 0.2, 3.0);
  params.cpu_base_mean = uniform(rng, 0.2, 3.0);
  params.contention_slope = uniform(rng, 0.0, 0.2);
  params.comm_mean = uniform(rng, 0.1, 8.0);
  params.bandwidth = uniform(rng, 1.0, 16.0);
  CostModel cm = synth_profile(graph, params, rng());
  return {std::move(graph), std::move(cm)};
}

// Kahn's algorithm with a uniformly drawn ready node at every step.
inline Order random_topo_order(const Graph& g, Rng& rng) {
  std::vector<std::size_t> indeg(g.size());
  std::vector<NodeId> ready;
  for (NodeId v = 0; v < g.size(); ++v) {
    indeg[v] = g.pred(v).size();
    if (indeg[v] == 0) ready.push_back(v);
  }
  Order order;
  while (!ready.empty()) {
    const auto pick = static_cast<std::size_t>(uniform_int(rng, 0, ready.size() - 1));
    const NodeId v = ready[pick];
    ready.erase(ready.begin() + static_cast<std::ptrdiff_t>(pick));
    order.push_back(v);
    for (NodeId c : g.succ(v)) {
      if (--indeg[c] == 0) ready.push_back(c);
    }
  }
  return order;
}

// Random order, random device classes and a random k'; cores resolved by the engine.
inline Plan random_plan(const Graph& g, const CostModel& cm, Rng& rng, double alpha = 0.0) {
  const Order order = random_topo_order(g, rng);
  const int k = static_cast<int>(uniform_int(rng, 0, static_cast<std::uint64_t>(cm.max_cores())));
  std::vector<DeviceClass> classes(g.size(), DeviceClass::gpu);
  if (k > 0) {
    for (auto& c : classes) c = uniform01(rng) < 0.5 ? DeviceClass::gpu : DeviceClass::cpu;
  }
  return resolve_plan(g, cm, order, classes, k, alpha);
}

inline bool is_valid_order(const Graph& g, const Order& order) {
  if (order.size() != g.size()) return false;
  std::vector<std::size_t> pos(g.size(), g.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] >= g.size() || pos[order[i]] != g.size()) return false;
    pos[order[i]] = i;
  }
  return std::all_of(g.edges().begin(), g.edges().end(),
                     [&](const Edge& e) { return pos[e.src] < pos[e.dst]; });
}

// GPU memory recomputed from the final selection alone.
inline double memory_from_selection(const Graph& g, const CostModel& cm, const Plan& plan) {
  double total = 0.0;
  for (NodeId v = 0; v < g.size(); ++v) {
    if (plan.cores[v] != kGpu) continue;
    const auto& m = cm.memory(v);
    double term = m.output + m.ephemeral + m.weights;
    for (NodeId p : g.pred(v)) {
      if (plan.cores[p] != kGpu) term += cm.memory(p).output;
    }
    total += term;
  }
  return total;
}

inline std::filesystem::path scratch_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("hetpart_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testsupport
