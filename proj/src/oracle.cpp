#include "hetpart/oracle.hpp"

#include <algorithm>
#include <future>
#include <limits>
#include <ostream>
#include <thread>

#include "hetpart/error.hpp"
#include "hetpart/planner.hpp"
#include "hetpart/random.hpp"

namespace hetpart {

std::vector<Order> all_topological_orders(const Graph& graph) {
  const std::size_t n = graph.size();
  std::vector<Order> out;
  std::vector<std::size_t> indeg(n);
  for (NodeId v = 0; v < n; ++v) indeg[v] = graph.pred(v).size();
  std::vector<bool> used(n, false);
  Order prefix;
  prefix.reserve(n);

  // Depth-first over ready sets, smallest ready node first.
  auto extend = [&](auto&& self) -> void {
    if (prefix.size() == n) {
      out.push_back(prefix);
      return;
    }
    for (NodeId v = 0; v < n; ++v) {
      if (used[v] || indeg[v] != 0) continue;
      used[v] = true;
      prefix.push_back(v);
      for (NodeId c : graph.succ(v)) --indeg[c];
      self(self);
      for (NodeId c : graph.succ(v)) ++indeg[c];
      prefix.pop_back();
      used[v] = false;
    }
  };
  extend(extend);
  return out;
}

namespace {

struct Candidate {
  double objective = std::numeric_limits<double>::infinity();
  std::size_t order_index = 0;
  std::uint64_t mask = 0;
  int cores = 0;
  std::uint64_t explored = 0;
};

// Node 0 maps to the most significant bit so ascending masks enumerate
// selection vectors lexicographically.
void classes_from_mask(std::uint64_t mask, std::vector<DeviceClass>& classes) {
  const std::size_t n = classes.size();
  for (std::size_t v = 0; v < n; ++v) {
    classes[v] = (mask >> (n - 1 - v)) & 1U ? DeviceClass::cpu : DeviceClass::gpu;
  }
}

Candidate search_range(const Graph& graph, const CostModel& cm, double alpha, EvalOptions options,
                       const std::vector<Order>& orders, std::size_t begin, std::size_t end) {
  const std::size_t n = graph.size();
  const std::uint64_t masks = std::uint64_t{1} << n;
  PlanResolver resolver(graph, cm, options);
  std::vector<DeviceClass> classes(n);
  std::vector<ProcessorId> cores;
  Candidate best;
  for (std::size_t o = begin; o < end; ++o) {
    for (std::uint64_t mask = 0; mask < masks; ++mask) {
      classes_from_mask(mask, classes);
      for (int active = mask == 0 ? 0 : 1; active <= cm.max_cores(); ++active) {
        const double objective = resolver.resolve(orders[o], classes, active, alpha, cores);
        ++best.explored;
        if (objective < best.objective) {
          best.objective = objective;
          best.order_index = o;
          best.mask = mask;
          best.cores = active;
        }
      }
    }
  }
  return best;
}

}  // namespace

OracleResult brute_force(const Graph& graph, const CostModel& cm, double alpha,
                         OracleLimits limits, EvalOptions options) {
  const std::size_t n = graph.size();
  if (n > limits.max_nodes || n > 20) {
    throw Error(errc::kTooLarge, "oracle: " + std::to_string(n) + " nodes exceeds limit of " +
                                     std::to_string(limits.max_nodes));
  }
  if (!(alpha >= 0.0)) throw Error(errc::kArgument, "alpha must be >= 0");
  bind(cm, graph);

  const auto orders = all_topological_orders(graph);
  unsigned threads = limits.threads ? limits.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, orders.size()));
  const std::size_t chunk = (orders.size() + threads - 1) / threads;

  std::vector<std::future<Candidate>> parts;
  for (std::size_t begin = 0; begin < orders.size(); begin += chunk) {
    const std::size_t end = std::min(orders.size(), begin + chunk);
    parts.push_back(std::async(std::launch::async, search_range, std::cref(graph), std::cref(cm),
                               alpha, options, std::cref(orders), begin, end));
  }
  Candidate best;
  std::uint64_t explored = 0;
  for (auto& part : parts) {
    Candidate c = part.get();
    explored += c.explored;
    if (c.objective < best.objective) best = c;
  }

  std::vector<DeviceClass> classes(n);
  classes_from_mask(best.mask, classes);
  OracleResult result;
  result.best_plan = resolve_plan(graph, cm, orders[best.order_index], classes, best.cores, alpha, options);
  result.best_objective = best.objective;
  result.explored = explored;
  return result;
}

namespace {

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - static_cast<double>(lo));
}

}  // namespace

GapReport greedy_gap(const std::vector<GapInstance>& corpus, OracleLimits limits) {
  GapReport report;
  std::vector<double> ratios;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& inst = corpus[i];
    const Order order = topo_sort_hybrid(inst.graph, inst.cm);
    const double greedy = select_devices_detailed(inst.graph, inst.cm, order, inst.alpha).objective;
    const OracleResult oracle = brute_force(inst.graph, inst.cm, inst.alpha, limits);
    GapRow row;
    row.index = i;
    row.nodes = inst.graph.size();
    row.max_cores = inst.cm.max_cores();
    row.alpha = inst.alpha;
    row.greedy = greedy;
    row.oracle = oracle.best_objective;
    row.ratio = oracle.best_objective > 0.0 ? greedy / oracle.best_objective : 1.0;
    row.explored = oracle.explored;
    ratios.push_back(row.ratio);
    report.rows.push_back(row);
  }
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    auto& q = report.quantiles;
    q.min = ratios.front();
    q.p25 = quantile(ratios, 0.25);
    q.median = quantile(ratios, 0.5);
    q.p75 = quantile(ratios, 0.75);
    q.p90 = quantile(ratios, 0.9);
    q.max = ratios.back();
    double sum = 0.0;
    for (double r : ratios) sum += r;
    q.mean = sum / static_cast<double>(ratios.size());
  }
  return report;
}

std::vector<GapInstance> random_gap_corpus(std::size_t count, std::size_t max_nodes, int max_cores,
                                           std::uint64_t seed) {
  static constexpr double kAlphas[] = {0.0, 0.01, 0.1, 0.5, 1.0};
  Rng rng(seed);
  std::vector<GapInstance> corpus;
  corpus.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = uniform_int(rng, 1, max_nodes);
    const double p = uniform(rng, 0.1, 0.7);
    Graph graph = gen_random_dag(n, p, rng());
    ProfileParams params;
    params.max_cores = static_cast<int>(uniform_int(rng, 1, static_cast<std::uint64_t>(max_cores)));
    params.gpu_mean = uniform(rng, 0.5, 2.0);
    params.cpu_base_mean = uniform(rng, 0.5, 3.0);
    params.contention_slope = uniform(rng, 0.0, 0.2);
    params.comm_mean = uniform(rng, 0.1, 4.0);
    params.bandwidth = uniform(rng, 1.0, 12.0);
    CostModel cm = synth_profile(graph, params, rng());
    const double alpha = kAlphas[uniform_int(rng, 0, std::size(kAlphas) - 1)];
    corpus.push_back({std::move(graph), std::move(cm), alpha});
  }
  return corpus;
}

nlohmann::json to_json(const GapReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"index", r.index},
                    {"n", r.nodes},
                    {"k", r.max_cores},
                    {"alpha", r.alpha},
                    {"greedy", r.greedy},
                    {"oracle", r.oracle},
                    {"ratio", r.ratio},
                    {"explored", r.explored}});
  }
  const auto& q = report.quantiles;
  return {{"instances", report.rows.size()},
          {"rows", std::move(rows)},
          {"quantiles",
           {{"min", q.min},
            {"p25", q.p25},
            {"median", q.median},
            {"p75", q.p75},
            {"p90", q.p90},
            {"max", q.max},
            {"mean", q.mean}}}};
}

void write_gap_csv(const GapReport& report, std::ostream& out) {
  const auto old_precision = out.precision(17);
  out << "index,n,k,alpha,greedy,oracle,ratio,explored\n";
  for (const auto& r : report.rows) {
    out << r.index << ',' << r.nodes << ',' << r.max_cores << ',' << r.alpha << ',' << r.greedy
        << ',' << r.oracle << ',' << r.ratio << ',' << r.explored << '\n';
  }
  out.precision(old_precision);
}

}  // namespace hetpart
