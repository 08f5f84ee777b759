#pragma once

#include <cstddef>
#include <vector>

#include "hetpart/cost_model.hpp"
#include "hetpart/engine.hpp"
#include "hetpart/graph.hpp"
#include "hetpart/plan.hpp"

namespace hetpart {

// Breadth-first ready-queue traversal seeded with every entry node. A popped
// node that still has an unscheduled predecessor goes back to the tail of
// the queue. After a node is appended, each child with a single predecessor
// whose transfer would cost more than its average execution time
// ((GPU time + time at k cores) / 2) is appended right away, recursively,
// instead of being queued.
Order topo_sort_hybrid(const Graph& graph, const CostModel& cm);

// Classical traversals from the entry nodes; ties by ascending node id.
Order topo_sort_bfs(const Graph& graph);
Order topo_sort_dfs(const Graph& graph);

struct Selection {
  Plan plan;
  // L + alpha * M of the greedy schedule for each core count 0..k.
  std::vector<double> total_costs;
  double objective = 0.0;
};

// Greedy device selection. For every core count k' in 0..k the order is
// walked once, each node going to the processor minimising
// EFT + alpha * (GPU memory it adds); ties prefer the GPU, then the lowest
// core id. The k' with the lowest L + alpha * M wins (ties: smallest k').
Selection select_devices_detailed(const Graph& graph, const CostModel& cm, const Order& order,
                                  double alpha, EvalOptions options = {});

Plan select_devices(const Graph& graph, const CostModel& cm, const Order& order, double alpha,
                    EvalOptions options = {});

std::size_t default_movement_threshold(std::size_t n);

// Rewrites selections that cause avoidable CPU/GPU copies:
//   - a node whose children all run on the other device class (flip the node),
//   - a node whose parents all run on the other device class (flip the node),
//   - a linear chain alternating device classes (flip its minority class).
// A rewrite qualifies only if it lowers the crossing-edge count and does not
// raise the evaluated objective; each round applies the cheapest one. Stops at `threshold` crossings or when no
// rewrite applies.
Plan reduce_movements(const Graph& graph, const CostModel& cm, const Plan& plan,
                      std::size_t threshold, EvalOptions options = {});

}  // namespace hetpart
