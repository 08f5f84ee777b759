#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "hetpart/cost_model.hpp"
#include "hetpart/engine.hpp"
#include "hetpart/graph.hpp"
#include "hetpart/plan.hpp"

namespace hetpart {

struct OracleLimits {
  std::size_t max_nodes = 8;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct OracleResult {
  Plan best_plan;
  double best_objective = 0.0;
  std::uint64_t explored = 0;  // (order, class assignment, core count) triples evaluated
};

// Every topological order of the graph, in lexicographic order.
std::vector<Order> all_topological_orders(const Graph& graph);

// Exhaustive search over orders x {GPU, CPU}^n x k' in 0..k. CPU nodes take
// the earliest available core. Ties resolve to the lexicographically smallest
// (order, selection, k') triple. Throws Error(too-large) above max_nodes.
OracleResult brute_force(const Graph& graph, const CostModel& cm, double alpha,
                         OracleLimits limits = {}, EvalOptions options = {});

struct GapInstance {
  Graph graph;
  CostModel cm;
  double alpha = 0.0;
};

struct GapRow {
  std::size_t index = 0;
  std::size_t nodes = 0;
  int max_cores = 0;
  double alpha = 0.0;
  double greedy = 0.0;
  double oracle = 0.0;
  double ratio = 1.0;
  std::uint64_t explored = 0;
};

struct GapQuantiles {
  double min = 0.0;
  double p25 = 0.0;
  double median = 0.0;
  double p75 = 0.0;
  double p90 = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

struct GapReport {
  std::vector<GapRow> rows;
  GapQuantiles quantiles;  // all zero for an empty report
};

// Greedy (hybrid order + select_devices) against the oracle, per instance.
GapReport greedy_gap(const std::vector<GapInstance>& corpus, OracleLimits limits = {});

// Seeded corpus of small random instances: n in [1, max_nodes], k in [1, max_cores].
std::vector<GapInstance> random_gap_corpus(std::size_t count, std::size_t max_nodes, int max_cores,
                                           std::uint64_t seed);

nlohmann::json to_json(const GapReport& report);
void write_gap_csv(const GapReport& report, std::ostream& out);

}  // namespace hetpart
