#include "hetpart/planner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "hetpart/error.hpp"

namespace hetpart {

namespace {

// Kahn's algorithm with either a FIFO (bfs) or a LIFO (dfs) frontier.
Order kahn(const Graph& graph, bool lifo) {
  const std::size_t n = graph.size();
  std::vector<std::size_t> indeg(n);
  std::deque<NodeId> frontier;
  for (NodeId v = 0; v < n; ++v) {
    indeg[v] = graph.pred(v).size();
    if (indeg[v] == 0) frontier.push_back(v);
  }
  if (lifo) std::reverse(frontier.begin(), frontier.end());

  Order order;
  order.reserve(n);
  std::vector<NodeId> released;
  while (!frontier.empty()) {
    NodeId v;
    if (lifo) {
      v = frontier.back();
      frontier.pop_back();
    } else {
      v = frontier.front();
      frontier.pop_front();
    }
    order.push_back(v);
    released.clear();
    for (NodeId c : graph.succ(v)) {
      if (--indeg[c] == 0) released.push_back(c);
    }
    if (lifo) {
      frontier.insert(frontier.end(), released.rbegin(), released.rend());
    } else {
      frontier.insert(frontier.end(), released.begin(), released.end());
    }
  }
  if (order.size() != n) throw std::logic_error("topological sort: graph has a cycle");
  return order;
}

}  // namespace

Order topo_sort_bfs(const Graph& graph) { return kahn(graph, false); }

Order topo_sort_dfs(const Graph& graph) { return kahn(graph, true); }

Order topo_sort_hybrid(const Graph& graph, const CostModel& cm) {
  const std::size_t n = graph.size();
  if (cm.size() != n) throw Error(errc::kValidation, "profile and graph disagree on node count");
  const int k = cm.max_cores();

  auto should_merge = [&](NodeId parent, NodeId child) {
    if (graph.pred(child).size() != 1) return false;
    const double transfer = cm.transfer_mb(parent, child) / cm.bandwidth();
    const double avg_exec = (cm.gpu_time(child) + cm.cpu_time(child, k)) / 2.0;
    return transfer > avg_exec;
  };

  Order order;
  order.reserve(n);
  std::vector<bool> marked(n, false), queued(n, false);
  std::deque<NodeId> queue;
  for (NodeId v : graph.entries()) {
    queue.push_back(v);
    queued[v] = true;
  }

  struct Frame {
    NodeId node;
    std::size_t next_child;
  };
  std::vector<Frame> chain;
  auto emit = [&](NodeId v) {
    marked[v] = true;
    order.push_back(v);
    chain.push_back({v, 0});
    while (!chain.empty()) {
      Frame& f = chain.back();
      const auto children = graph.succ(f.node);
      if (f.next_child == children.size()) {
        chain.pop_back();
        continue;
      }
      const NodeId parent = f.node;
      const NodeId c = children[f.next_child++];
      if (marked[c] || queued[c]) continue;
      if (should_merge(parent, c)) {
        marked[c] = true;
        order.push_back(c);
        chain.push_back({c, 0});  // invalidates f
      } else {
        queue.push_back(c);
        queued[c] = true;
      }
    }
  };

  std::size_t stalled = 0;
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    const auto preds = graph.pred(v);
    const bool ready = std::all_of(preds.begin(), preds.end(), [&](NodeId m) { return marked[m]; });
    if (ready) {
      stalled = 0;
      emit(v);
    } else {
      queue.push_back(v);
      if (++stalled > queue.size()) {
        throw std::logic_error("topological sort: graph has a cycle");
      }
    }
  }
  if (order.size() != n) throw std::logic_error("topological sort: graph has a cycle");
  return order;
}

Selection select_devices_detailed(const Graph& graph, const CostModel& cm, const Order& order,
                                  double alpha, EvalOptions options) {
  if (!(std::isfinite(alpha) && alpha >= 0.0)) {
    throw Error(errc::kArgument, "alpha must be a finite value >= 0");
  }
  if (auto problems = order_violations(graph, order); !problems.empty()) {
    throw Error(errc::kPlanMismatch, "select_devices: " + problems.front());
  }
  ScheduleState state(graph, cm, options);
  Selection best;
  best.objective = std::numeric_limits<double>::infinity();
  std::vector<ProcessorId> cores(graph.size(), kGpu);

  for (int active = 0; active <= cm.max_cores(); ++active) {
    state.reset(active);
    for (NodeId v : order) {
      ProcessorId chosen = kGpu;
      double chosen_cost = std::numeric_limits<double>::infinity();
      double chosen_start = 0.0, chosen_finish = 0.0, chosen_memory = 0.0;
      for (ProcessorId p = 0; p <= active; ++p) {
        const double start = state.start_time(v, p);
        const double finish = start + state.exec(v, p);
        const double memory = state.memory_delta(v, p);
        const double cost = finish + alpha * memory;
        if (cost < chosen_cost) {
          chosen = p;
          chosen_cost = cost;
          chosen_start = start;
          chosen_finish = finish;
          chosen_memory = memory;
        }
      }
      state.place(v, chosen, chosen_start, chosen_finish, chosen_memory);
      cores[v] = chosen;
    }
    const double total = state.latency() + alpha * state.gpu_memory();
    best.total_costs.push_back(total);
    if (total < best.objective) {
      best.objective = total;
      best.plan.order = order;
      best.plan.cores = cores;
      best.plan.k_star = active;
      best.plan.alpha = alpha;
    }
  }
  return best;
}

Plan select_devices(const Graph& graph, const CostModel& cm, const Order& order, double alpha,
                    EvalOptions options) {
  return select_devices_detailed(graph, cm, order, alpha, options).plan;
}

std::size_t default_movement_threshold(std::size_t n) { return std::max<std::size_t>(1, n / 10); }

namespace {

DeviceClass flipped(DeviceClass c) {
  return c == DeviceClass::gpu ? DeviceClass::cpu : DeviceClass::gpu;
}

std::size_t crossings_of(const Graph& graph, const std::vector<DeviceClass>& classes) {
  std::size_t count = 0;
  for (const auto& e : graph.edges()) {
    if (classes[e.src] != classes[e.dst]) ++count;
  }
  return count;
}

// Maximal paths whose consecutive nodes are joined by a sole out-edge that
// is also the sole in-edge of the next node.
std::vector<std::vector<NodeId>> linear_chains(const Graph& graph) {
  auto linked = [&](NodeId u) {
    return graph.succ(u).size() == 1 && graph.pred(graph.succ(u)[0]).size() == 1;
  };
  std::vector<std::vector<NodeId>> chains;
  for (NodeId v = 0; v < graph.size(); ++v) {
    const auto preds = graph.pred(v);
    if (preds.size() == 1 && linked(preds[0])) continue;  // not a chain head
    std::vector<NodeId> chain{v};
    NodeId u = v;
    while (linked(u)) {
      u = graph.succ(u)[0];
      chain.push_back(u);
    }
    if (chain.size() >= 3) chains.push_back(std::move(chain));
  }
  return chains;
}

}  // namespace

Plan reduce_movements(const Graph& graph, const CostModel& cm, const Plan& plan,
                      std::size_t threshold, EvalOptions options) {
  Plan current = plan;
  double current_objective = evaluate(graph, cm, current, options).objective;
  std::vector<DeviceClass> classes = current.selection();
  std::size_t crossings = crossings_of(graph, classes);
  if (crossings <= threshold || current.k_star == 0) return current;

  const auto chains = linear_chains(graph);
  PlanResolver resolver(graph, cm, options);
  std::vector<ProcessorId> cores;

  // Every rewrite that lowers the crossing count is scored; the one with the
  // lowest objective wins the round (ties: fewer crossings, then scan order).
  std::vector<std::vector<DeviceClass>> candidates;
  while (crossings > threshold) {
    candidates.clear();
    for (NodeId v = 0; v < graph.size(); ++v) {
      const auto kids = graph.succ(v);
      if (!kids.empty() &&
          std::all_of(kids.begin(), kids.end(), [&](NodeId c) { return classes[c] != classes[v]; })) {
        candidates.push_back(classes);
        candidates.back()[v] = flipped(classes[v]);
      }
    }
    for (NodeId v = 0; v < graph.size(); ++v) {
      const auto parents = graph.pred(v);
      if (!parents.empty() &&
          std::all_of(parents.begin(), parents.end(), [&](NodeId m) { return classes[m] != classes[v]; })) {
        candidates.push_back(classes);
        candidates.back()[v] = flipped(classes[v]);
      }
    }
    for (const auto& chain : chains) {
      std::size_t internal = 0, on_gpu = 0;
      for (std::size_t j = 0; j < chain.size(); ++j) {
        if (classes[chain[j]] == DeviceClass::gpu) ++on_gpu;
        if (j > 0 && classes[chain[j]] != classes[chain[j - 1]]) ++internal;
      }
      if (internal < 2) continue;
      const std::size_t on_cpu = chain.size() - on_gpu;
      const DeviceClass majority = on_gpu > on_cpu   ? DeviceClass::gpu
                                   : on_cpu > on_gpu ? DeviceClass::cpu
                                                     : classes[chain.front()];
      candidates.push_back(classes);
      for (NodeId v : chain) candidates.back()[v] = majority;
    }

    std::size_t best = candidates.size(), best_crossings = crossings;
    double best_objective = current_objective;
    std::vector<ProcessorId> best_cores;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const std::size_t c = crossings_of(graph, candidates[i]);
      if (c >= crossings) continue;
      const double objective =
          resolver.resolve(current.order, candidates[i], current.k_star, current.alpha, cores);
      if (objective > best_objective) continue;
      if (best < candidates.size() && objective == best_objective && c >= best_crossings) continue;
      best = i;
      best_objective = objective;
      best_crossings = c;
      best_cores = cores;
    }
    if (best == candidates.size()) break;
    classes = candidates[best];
    crossings = best_crossings;
    current_objective = best_objective;
    current.cores = best_cores;
  }
  return current;
}

}  // namespace hetpart
