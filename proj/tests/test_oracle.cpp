#include <doctest.h>

#include <limits>
#include <numeric>
#include <sstream>

#include "hetpart/error.hpp"
#include "hetpart/oracle.hpp"
#include "hetpart/planner.hpp"
#include "support.hpp"

using namespace hetpart;

namespace {

// Linear extensions by filtering every permutation.
std::vector<Order> orders_by_permutation(const Graph& g) {
  Order perm(g.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Order> out;
  do {
    if (testsupport::is_valid_order(g, perm)) out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

// Minimum objective over orders x classes x k', evaluated through resolve_plan + evaluate.
double enumerate_minimum(const Graph& g, const CostModel& cm, double alpha) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = g.size();
  for (const Order& order : orders_by_permutation(g)) {
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::vector<DeviceClass> classes(n);
      for (std::size_t v = 0; v < n; ++v) classes[v] = (mask >> v) & 1u ? DeviceClass::cpu : DeviceClass::gpu;
      for (int k = mask == 0 ? 0 : 1; k <= cm.max_cores(); ++k) {
        const Plan plan = resolve_plan(g, cm, order, classes, k, alpha);
        best = std::min(best, evaluate(g, cm, plan).objective);
      }
    }
  }
  return best;
}

CostModel integer_gpu_dominant(const Graph& g, int k) {
  std::vector<std::vector<double>> times(g.size(), std::vector<double>(k + 1, 100.0));
  for (auto& row : times) row[0] = 1.0;
  std::vector<Transfer> transfers;
  for (const Edge& e : g.edges()) transfers.push_back({e.src, e.dst, 4.0});
  return CostModel(k, 1.0, times, transfers, std::vector<MemoryFootprint>(g.size(), {1, 2, 1, 1}));
}

}  // namespace

TEST_CASE("topological orders are enumerated lexicographically") {
  const Graph diamond(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  CHECK(all_topological_orders(diamond) == std::vector<Order>{{0, 1, 2, 3}, {0, 2, 1, 3}});
  hetpart::Rng rng(41);
  for (int i = 0; i < 100; ++i) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 7));
    const Graph g = gen_random_dag(n, uniform01(rng), rng());
    CHECK(all_topological_orders(g) == orders_by_permutation(g));
  }
  CHECK(all_topological_orders(gen_demo7()).size() == orders_by_permutation(gen_demo7()).size());
}

TEST_CASE("single node: GPU when faster, CPU when alpha is huge") {
  const Graph g(1, {});
  const CostModel cm(2, 1.0, {{1.0, 3.0, 4.0}}, {}, {{1, 1, 1, 1}});
  const OracleResult fast = brute_force(g, cm, 0.0);
  CHECK(fast.best_plan.cores == std::vector<ProcessorId>{kGpu});
  CHECK(fast.best_objective == 1.0);
  const OracleResult lean = brute_force(g, cm, 1e6);
  CHECK(lean.best_plan.cores == std::vector<ProcessorId>{1});
  CHECK(evaluate(g, cm, lean.best_plan).gpu_memory == 0.0);
  CHECK(lean.best_objective == 3.0);
}

TEST_CASE("explored counts orders x (2^n * k + 1)") {
  const Graph g = gen_demo7();
  const CostModel cm = synth_profile(g, {.max_cores = 2}, 5);
  const auto orders = orders_by_permutation(g).size();
  CHECK(brute_force(g, cm, 0.1).explored == orders * ((1u << 7) * 2 + 1));
}

TEST_CASE("oracle matches an independent enumeration on tiny instances") {
  hetpart::Rng rng(42);
  for (int i = 0; i < 60; ++i) {
    auto [g, cm] = testsupport::random_instance(rng, 5, 3);
    const double alpha = uniform(rng, 0.0, 1.0);
    const OracleResult r = brute_force(g, cm, alpha);
    CHECK(r.best_objective == enumerate_minimum(g, cm, alpha));
    CHECK(evaluate(g, cm, r.best_plan).objective == r.best_objective);
    CHECK(plan_violations(g, r.best_plan, cm.max_cores()).empty());
  }
}

TEST_CASE("oracle never loses to the greedy and is thread-count independent") {
  hetpart::Rng rng(43);
  for (int i = 0; i < 60; ++i) {
    auto [g, cm] = testsupport::random_instance(rng, 7, 4);
    const double alpha = uniform(rng, 0.0, 1.0);
    const OracleResult one = brute_force(g, cm, alpha, {8, 1});
    const OracleResult many = brute_force(g, cm, alpha, {8, 8});
    CHECK(one.best_plan == many.best_plan);
    CHECK(one.best_objective == many.best_objective);
    const Plan greedy = select_devices(g, cm, topo_sort_hybrid(g, cm), alpha);
    CHECK(one.best_objective <= evaluate(g, cm, greedy).objective);
  }
}

TEST_CASE("demo7 oracle dominates the greedy") {
  const Graph g = gen_demo7();
  const CostModel cm = synth_profile(g, {.max_cores = 3}, 99);
  const OracleResult r = brute_force(g, cm, 0.0);
  const Plan greedy = select_devices(g, cm, topo_sort_hybrid(g, cm), 0.0);
  CHECK(r.best_objective <= evaluate(g, cm, greedy).objective);
}

TEST_CASE("instances above the node limit are refused") {
  const Graph g = gen_lstm_grid(3, 3);
  const CostModel cm = synth_profile(g, {}, 1);
  try {
    brute_force(g, cm, 0.0);
    FAIL("expected too-large");
  } catch (const Error& e) {
    CHECK(e.code() == "too-large");
  }
}

TEST_CASE("greedy gap: empty corpus") {
  const GapReport report = greedy_gap({});
  CHECK(report.rows.empty());
  CHECK(report.quantiles.median == 0.0);
  CHECK(report.quantiles.max == 0.0);
}

TEST_CASE("greedy gap: GPU-dominant corpus has every ratio exactly 1") {
  hetpart::Rng rng(44);
  std::vector<GapInstance> corpus;
  for (int i = 0; i < 30; ++i) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 6));
    Graph g = gen_random_dag(n, 0.4, rng());
    CostModel cm = integer_gpu_dominant(g, static_cast<int>(uniform_int(rng, 1, 3)));
    corpus.push_back({std::move(g), std::move(cm), 0.0});
  }
  const GapReport report = greedy_gap(corpus);
  REQUIRE(report.rows.size() == corpus.size());
  for (const GapRow& row : report.rows) CHECK(row.ratio == 1.0);
}

TEST_CASE("greedy gap: quantiles follow the rows") {
  const auto corpus = random_gap_corpus(40, 6, 3, 7);
  const GapReport report = greedy_gap(corpus);
  std::vector<double> ratios;
  for (const GapRow& row : report.rows) {
    CHECK(row.ratio >= 1.0);
    CHECK(row.ratio == row.greedy / row.oracle);
    ratios.push_back(row.ratio);
  }
  std::sort(ratios.begin(), ratios.end());
  // 40 values: the median interpolates between the 20th and 21st.
  CHECK(report.quantiles.median == doctest::Approx((ratios[19] + ratios[20]) / 2));
  CHECK(report.quantiles.min == ratios.front());
  CHECK(report.quantiles.max == ratios.back());
  CHECK(report.quantiles.p25 <= report.quantiles.median);
  CHECK(report.quantiles.median <= report.quantiles.p75);
  CHECK(report.quantiles.p75 <= report.quantiles.p90);

  const auto doc = to_json(report);
  CHECK(doc.at("rows").size() == 40);
  std::ostringstream csv;
  write_gap_csv(report, csv);
  const std::string text = csv.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 41);
}

TEST_CASE("gap corpus is seeded and within limits") {
  const auto a = random_gap_corpus(50, 7, 4, 3);
  const auto b = random_gap_corpus(50, 7, 4, 3);
  REQUIRE(a.size() == 50);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].graph == b[i].graph);
    CHECK(a[i].cm == b[i].cm);
    CHECK(a[i].alpha == b[i].alpha);
    CHECK(a[i].graph.size() <= 7);
    CHECK(a[i].cm.max_cores() <= 4);
  }
}
