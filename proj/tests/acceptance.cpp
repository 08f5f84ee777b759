// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>

#include "hetpart/error.hpp"
#include "hetpart/oracle.hpp"
#include "hetpart/planner.hpp"
#include "hetpart/serving.hpp"
#include "support.hpp"

using namespace hetpart;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double x) {
  std::ostringstream out;
  out.precision(6);
  out << x;
  return out.str();
}

// Seeded corpus shared by criteria 3 and 4: random DAGs plus demo7 and LSTM grids.
std::vector<testsupport::Instance> profile_corpus() {
  std::vector<testsupport::Instance> corpus;
  Rng rng(3003);
  for (int i = 0; i < 300; ++i) corpus.push_back(testsupport::random_instance(rng, 40, 8));
  for (std::uint64_t s = 0; s < 20; ++s) {
    corpus.push_back({gen_demo7(), synth_profile(gen_demo7(), {}, s)});
    const Graph lstm = gen_lstm_grid(1 + s % 4, 2 + s % 7);
    corpus.push_back({lstm, synth_profile(lstm, {}, s)});
  }
  return corpus;
}

Outcome order_validity() {
  Rng rng(1001);
  std::size_t failures = 0;
  const auto t0 = Clock::now();
  for (int i = 0; i < 1000; ++i) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 200));
    const Graph g = gen_random_dag(n, uniform(rng, 0.0, 0.15), rng());
    ProfileParams params;
    params.comm_mean = uniform(rng, 0.1, 30.0);
    const CostModel cm = synth_profile(g, params, rng());
    for (const Order& o : {topo_sort_hybrid(g, cm), topo_sort_bfs(g), topo_sort_dfs(g)}) {
      if (!testsupport::is_valid_order(g, o)) ++failures;
    }
  }
  const double secs = seconds_since(t0);
  return {failures == 0 && secs < 10.0,
          "1000 DAGs x 3 sorts, failures=" + std::to_string(failures) + ", " + num(secs) + " s (limit 10 s)"};
}

Outcome twin() {
  Rng rng(1002);
  std::size_t failures = 0;
  for (int i = 0; i < 1000; ++i) {
    auto [g, cm] = testsupport::random_instance(rng, 60, 8);
    const Plan plan = uniform01(rng) < 0.5
                          ? testsupport::random_plan(g, cm, rng, uniform(rng, 0, 1))
                          : select_devices(g, cm, topo_sort_hybrid(g, cm), uniform(rng, 0, 1));
    if (simulate(g, cm, plan, false).makespan != evaluate(g, cm, plan).latency) ++failures;
  }
  return {failures == 0, "1000 triples, bit-inequal makespans=" + std::to_string(failures)};
}

Outcome degenerate_identities() {
  std::size_t failures = 0, count = 0;
  for (const auto& [g, cm] : profile_corpus()) {
    const auto base = baseline_plans(g, cm);
    double expected = 0.0;
    for (NodeId v = 0; v < g.size(); ++v) {
      const auto& m = cm.memory(v);
      expected += m.output + m.ephemeral + m.weights;
    }
    if (base.all_gpu.k_star != 0 || evaluate(g, cm, base.all_gpu).gpu_memory != expected) ++failures;
    if (evaluate(g, cm, base.all_cpu).gpu_memory != 0.0) ++failures;
    ++count;
  }
  return {failures == 0, std::to_string(count) + " profiles, failures=" + std::to_string(failures)};
}

Outcome alpha_forcing() {
  std::size_t failures = 0, count = 0;
  for (const auto& [g, cm] : profile_corpus()) {
    double numer = 0.0, min_mem = std::numeric_limits<double>::infinity();
    for (NodeId v = 0; v < g.size(); ++v) {
      for (double w : cm.time_row(v)) numer += w;
      const auto& m = cm.memory(v);
      const double contrib = m.output + m.ephemeral + m.weights;
      if (contrib > 0.0) min_mem = std::min(min_mem, contrib);
    }
    for (const Transfer& t : cm.transfers()) numer += t.mb / cm.bandwidth();
    const double alpha = std::nextafter(numer / min_mem, std::numeric_limits<double>::infinity()) * 1.000001;
    const Plan plan = select_devices(g, cm, topo_sort_hybrid(g, cm), alpha);
    bool all_cpu = plan.k_star >= 1;
    for (ProcessorId p : plan.cores) all_cpu = all_cpu && p != kGpu;
    if (!all_cpu) ++failures;
    ++count;
  }
  return {failures == 0, std::to_string(count) + " instances, non-CPU selections=" + std::to_string(failures)};
}

Outcome oracle_dominance(const fs::path& artifacts) {
  const auto t0 = Clock::now();
  const auto corpus = random_gap_corpus(200, 7, 4, 2024);
  const GapReport report = greedy_gap(corpus);
  const double secs = seconds_since(t0);
  std::size_t below = 0;
  for (const GapRow& row : report.rows) {
    if (!(row.ratio >= 1.0)) ++below;
  }
  write_text_file_atomic(artifacts / "gap.json", to_json(report).dump(1) + "\n");
  std::ostringstream csv;
  write_gap_csv(report, csv);
  write_text_file_atomic(artifacts / "gap.csv", csv.str());
  return {below == 0 && report.rows.size() == 200 && secs < 300.0,
          "200 instances, ratio<1: " + std::to_string(below) + ", median=" + num(report.quantiles.median) +
              ", p90=" + num(report.quantiles.p90) + ", max=" + num(report.quantiles.max) + ", " + num(secs) +
              " s (limit 300 s)"};
}

Outcome sweep_shape() {
  const auto t0 = Clock::now();
  ProfileParams params;
  params.gpu_mean = 1.0;
  params.cpu_base_mean = 1.0;
  std::string detail;
  bool pass = true;
  const std::pair<std::string, Graph> graphs[] = {{"demo7", gen_demo7()}, {"lstm4x8", gen_lstm_grid(4, 8)}};
  for (const auto& [name, g] : graphs) {
    const CostModel cm = synth_profile(g, params, 7);
    const Order order = topo_sort_hybrid(g, cm);
    std::vector<EvalResult> sweep;
    for (int i = 0; i <= 10; ++i) sweep.push_back(evaluate(g, cm, select_devices(g, cm, order, i / 10.0)));
    const EvalResult& first = sweep.front();
    const EvalResult& last = sweep.back();
    const bool ok = last.gpu_memory < first.gpu_memory && first.latency <= last.latency;
    pass = pass && ok;
    detail += name + ": M " + num(first.gpu_memory) + " -> " + num(last.gpu_memory) + ", L " +
              num(first.latency) + " -> " + num(last.latency) + "; ";
  }
  const double secs = seconds_since(t0);
  return {pass && secs < 30.0, detail + num(secs) + " s (limit 30 s)"};
}

Outcome serving_ordering() {
  // Three LSTM-shaped models, three copies each: nine models on one GPU.
  std::vector<double> alphas;
  for (int i = 0; i <= 10; ++i) alphas.push_back(i / 10.0);
  PatternModels models;
  ProfileParams params;
  params.cpu_base_mean = 1.0;
  const Graph shapes[] = {gen_lstm_grid(2, 6), gen_lstm_grid(3, 4), gen_lstm_grid(4, 8)};
  for (std::size_t m = 0; m < 3; ++m) {
    const CostModel cm = synth_profile(shapes[m], params, 70 + m);
    const PatternDerivation d = derive_patterns("m" + std::to_string(m), shapes[m], cm, alphas);
    for (int c = 0; c < 3; ++c) {
      const std::string id = "m" + std::to_string(m) + "_" + std::to_string(c);
      ModelEntry gpu = d.gpu, lat = d.latency_optimal, mem = d.memory_optimal;
      gpu.id = lat.id = mem.id = id;
      models.gpu.push_back(gpu);
      models.latency_optimal.push_back(lat);
      models.memory_optimal.push_back(mem);
    }
  }
  double sum_gpu = 0.0, sum_mem = 0.0, largest = 0.0;
  for (std::size_t i = 0; i < models.gpu.size(); ++i) {
    sum_gpu += models.gpu[i].gpu_footprint_mb;
    sum_mem += models.memory_optimal[i].gpu_footprint_mb;
    largest = std::max({largest, models.gpu[i].gpu_footprint_mb, models.latency_optimal[i].gpu_footprint_mb});
  }
  ServerConfig server;
  server.capacity_mb = std::max(sum_mem, largest) * 1.05;
  if (!(server.capacity_mb < sum_gpu)) {
    return {false, "could not place capacity between memopt sum " + num(sum_mem) + " and gpu sum " + num(sum_gpu)};
  }
  Workload w;
  w.total_requests = 1800;
  const PatternReport report =
      compare_patterns(models.gpu, models.latency_optimal, models.memory_optimal, server, w);
  const double gpu = report.rows[0].metrics.swapping_rate();
  const double lat = report.rows[1].metrics.swapping_rate();
  const double mem = report.rows[2].metrics.swapping_rate();
  return {mem == 0.0 && gpu > 0.0 && lat <= gpu,
          "capacity " + num(server.capacity_mb) + " MB (gpu sum " + num(sum_gpu) + ", memopt sum " + num(sum_mem) +
              "); swapping gpu=" + num(gpu) + " latopt=" + num(lat) + " memopt=" + num(mem) +
              "; slo violation gpu=" + num(report.rows[0].metrics.slo_violation()) +
              " latopt=" + num(report.rows[1].metrics.slo_violation()) +
              " memopt=" + num(report.rows[2].metrics.slo_violation())};
}

Outcome reduce_safety() {
  Rng rng(1008);
  std::size_t failures = 0, changed = 0;
  for (int i = 0; i < 200; ++i) {
    auto [g, cm] = testsupport::random_instance(rng, 40, 6);
    const double alpha = uniform(rng, 0.0, 1.0);
    const Plan plan = i % 2 == 0 ? testsupport::random_plan(g, cm, rng, alpha)
                                 : select_devices(g, cm, topo_sort_hybrid(g, cm), alpha);
    const std::size_t threshold = i % 3 == 0 ? 0 : default_movement_threshold(g.size());
    const Plan reduced = reduce_movements(g, cm, plan, threshold);
    if (!plan_violations(g, reduced, cm.max_cores()).empty()) ++failures;
    else if (evaluate(g, cm, reduced).objective > evaluate(g, cm, plan).objective) ++failures;
    if (!(reduced == plan)) ++changed;
  }
  return {failures == 0,
          "200 plans, failures=" + std::to_string(failures) + ", plans rewritten=" + std::to_string(changed)};
}

Outcome round_trips(const fs::path& artifacts) {
  Rng rng(1009);
  const fs::path dir = artifacts / "roundtrip";
  fs::create_directories(dir);
  std::size_t failures = 0;
  for (int i = 0; i < 500; ++i) {
    auto [g, cm] = testsupport::random_instance(rng, 40, 8);
    const Plan plan = testsupport::random_plan(g, cm, rng, uniform(rng, 0, 2));
    Scenario s;
    s.server = {uniform(rng, 10, 500), uniform(rng, 1, 20),
                uniform01(rng) < 0.5 ? EvictionPolicy::lru : EvictionPolicy::fifo};
    s.workload = {static_cast<std::size_t>(uniform_int(rng, 1, 5000)),
                  uniform01(rng) < 0.5 ? RequestPattern::uniform : RequestPattern::random, rng(),
                  static_cast<ArrivalProcess>(uniform_int(rng, 0, 2)), uniform(rng, 0.1, 9)};
    for (int m = 0; m < static_cast<int>(uniform_int(rng, 1, 6)); ++m) {
      s.models.push_back({"model" + std::to_string(m), uniform(rng, 0, 9), uniform(rng, 0, 9), uniform(rng, 0, 9),
                          uniform(rng, 0.1, 9)});
    }
    if (i % 2) s.patterns = PatternModels{s.models, s.models, s.models};

    save_graph(g, dir / "graph.json");
    save_profile(cm, dir / "profile.json");
    save_plan(plan, dir / "plan.json");
    save_scenario(s, dir / "scenario.json");
    if (!(load_graph(dir / "graph.json") == g)) ++failures;
    if (!(load_profile(dir / "profile.json") == cm)) ++failures;
    if (!(load_plan(dir / "plan.json") == plan)) ++failures;
    if (!(load_scenario(dir / "scenario.json") == s)) ++failures;
  }
  fs::remove_all(dir);
  return {failures == 0, "500 artifacts x 4 formats, mismatches=" + std::to_string(failures)};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path artifacts = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_artifacts");
  fs::create_directories(artifacts);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 order validity", order_validity},
      {"2 evaluate/simulate twin", twin},
      {"3 degenerate-plan memory identities", degenerate_identities},
      {"4 alpha-forcing bound", alpha_forcing},
      {"5 oracle dominance", [&] { return oracle_dominance(artifacts); }},
      {"6 alpha sweep shape", sweep_shape},
      {"7 serving pattern ordering", serving_ordering},
      {"8 reduce_movements safety", reduce_safety},
      {"9 JSON round-trip fidelity", [&] { return round_trips(artifacts); }},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << ": " << o.detail << std::endl;
    if (!o.pass) ++failed;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
