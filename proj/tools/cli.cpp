#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <future>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hetpart/cost_model.hpp"
#include "hetpart/engine.hpp"
#include "hetpart/error.hpp"
#include "hetpart/graph.hpp"
#include "hetpart/oracle.hpp"
#include "hetpart/plan.hpp"
#include "hetpart/planner.hpp"
#include "hetpart/serving.hpp"

namespace hetpart::cli {

namespace fs = std::filesystem;
using nlohmann::json;

AlphaSweep parse_alpha_sweep(const std::string& text) {
  AlphaSweep sweep;
  std::vector<double> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(errc::kArgument, "alpha sweep \"" + text + "\" is not start:stop:step");
    }
  }
  if (parts.size() != 3) throw Error(errc::kArgument, "alpha sweep \"" + text + "\" is not start:stop:step");
  sweep = {parts[0], parts[1], parts[2]};
  if (!(sweep.start >= 0.0) || !(sweep.step > 0.0) || !(sweep.stop >= sweep.start) ||
      !std::isfinite(sweep.stop)) {
    throw Error(errc::kArgument, "alpha sweep needs 0 <= start <= stop and step > 0");
  }
  return sweep;
}

std::vector<double> sweep_values(const AlphaSweep& sweep) {
  const auto count = static_cast<std::size_t>(std::floor((sweep.stop - sweep.start) / sweep.step + 1e-9)) + 1;
  std::vector<double> values;
  values.reserve(count);
  // Rounded so 0.1-steps print as 0.3 rather than 0.30000000000000004.
  for (std::size_t i = 0; i < count; ++i) {
    values.push_back(std::round((sweep.start + static_cast<double>(i) * sweep.step) * 1e12) / 1e12);
  }
  return values;
}

namespace {

// Input loaders that turn a missing file into "<kind>-not-found".
template <class Loader>
auto load_input(const std::string& kind, const std::string& path, Loader loader) {
  try {
    return loader(fs::path(path));
  } catch (const Error& e) {
    if (e.code() == errc::kNotFound) throw Error(kind + "-not-found", e.what());
    if (e.code() == errc::kArgument) throw;
    throw Error(kind + "-" + e.code(), e.what());
  }
}

// Shortest text that reads back to the same double.
std::string shortest(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_json(const fs::path& path, const json& doc) {
  write_text_file_atomic(path, doc.dump(1) + "\n");
}

template <class Writer>
void write_stream(const fs::path& path, Writer writer) {
  std::ostringstream buf;
  writer(buf);
  write_text_file_atomic(path, buf.str());
}

struct Loaded {
  Graph graph;
  CostModel cm;
};

Loaded load_pair(const std::string& graph_path, const std::string& profile_path) {
  Graph graph = load_input("graph", graph_path, load_graph);
  CostModel cm = load_input("profile", profile_path, load_profile);
  try {
    bind(cm, graph);
  } catch (const Error& e) {
    throw Error("profile-mismatch", e.what());
  }
  return {std::move(graph), std::move(cm)};
}

void write_sweep_svg(const std::vector<json>& rows, double gpu_latency, double cpu_latency,
                     std::ostream& out) {
  constexpr double kW = 640, kH = 320, kPad = 50;
  double max_latency = std::max(gpu_latency, cpu_latency), max_memory = 0.0;
  double min_alpha = rows.front()["alpha"].get<double>(), max_alpha = rows.back()["alpha"].get<double>();
  for (const auto& r : rows) {
    max_latency = std::max(max_latency, r["latency_L"].get<double>());
    max_memory = std::max(max_memory, r["gpu_memory"].get<double>());
  }
  if (max_alpha <= min_alpha) max_alpha = min_alpha + 1.0;
  if (max_latency <= 0) max_latency = 1;
  if (max_memory <= 0) max_memory = 1;
  auto x = [&](double a) { return kPad + (a - min_alpha) / (max_alpha - min_alpha) * (kW - 2 * kPad); };
  auto y = [&](double v, double vmax) { return kH - kPad - v / vmax * (kH - 2 * kPad); };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect x=\"" << kPad << "\" y=\"" << kPad << "\" width=\"" << kW - 2 * kPad << "\" height=\""
      << kH - 2 * kPad << "\" fill=\"none\" stroke=\"#999\"/>\n";
  auto polyline = [&](const char* key, double vmax, const char* color) {
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& r : rows) out << x(r["alpha"].get<double>()) << ',' << y(r[key].get<double>(), vmax) << ' ';
    out << "\"/>\n";
  };
  polyline("latency_L", max_latency, "#1e88e5");
  polyline("gpu_memory", max_memory, "#fb8c00");
  for (double base : {gpu_latency, cpu_latency}) {
    out << "<line x1=\"" << kPad << "\" x2=\"" << kW - kPad << "\" y1=\"" << y(base, max_latency) << "\" y2=\""
        << y(base, max_latency) << "\" stroke=\"#e53935\" stroke-dasharray=\"4 3\"/>\n";
  }
  out << "<text x=\"" << kPad << "\" y=\"" << kPad - 20 << "\" fill=\"#1e88e5\">latency (max " << max_latency
      << " ms)</text>\n";
  out << "<text x=\"" << kPad + 220 << "\" y=\"" << kPad - 20 << "\" fill=\"#fb8c00\">GPU memory (max "
      << max_memory << " MB)</text>\n";
  out << "<text x=\"" << kW / 2 - 10 << "\" y=\"" << kH - 15 << "\">alpha</text>\n";
  out << "</svg>\n";
}

struct Options {
  std::string out_dir = "out";
  std::uint64_t seed = 1;

  std::string kind = "demo7";
  std::size_t layers = 4, seq_len = 8, nodes = 10;
  double edge_prob = 0.3;

  std::string graph_path, profile_path, plan_path, scenario_path;
  ProfileParams params;
  std::vector<double> mem_means;
  std::vector<double> multipliers;

  double alpha = 0.0;
  std::string alpha_sweep = "0:1:0.1";
  bool pcie_contention = false;
  bool io_transfers = false;
  std::string movement_threshold;
  bool svg = false;

  std::size_t instances = 200, max_nodes = 7;
  int max_cores = 4;

  std::vector<std::string> model_graphs, model_profiles;
  std::size_t copies = 3;
  double capacity_fraction = 0.6;
  std::size_t requests = 1000;
  std::string request_pattern = "uniform";
  double slo_slack = 1.25;
};

json config_echo(const std::string& command, const Options& o, const json& extra) {
  json cfg = {{"subcommand", command}, {"seed", o.seed}, {"out", o.out_dir}};
  for (const auto& [key, value] : extra.items()) cfg[key] = value;
  return cfg;
}

void cmd_gen_graph(const Options& o, std::ostream& out) {
  Graph graph = [&] {
    if (o.kind == "lstm") return gen_lstm_grid(o.layers, o.seq_len);
    if (o.kind == "demo7") return gen_demo7();
    if (o.kind == "random") return gen_random_dag(o.nodes, o.edge_prob, o.seed);
    throw Error(errc::kArgument, "unknown graph kind " + o.kind);
  }();
  const fs::path dir(o.out_dir);
  save_graph(graph, dir / "graph.json");
  write_json(dir / "config.json",
             config_echo("gen-graph", o,
                         {{"kind", o.kind},
                          {"layers", o.layers},
                          {"seq_len", o.seq_len},
                          {"nodes", o.nodes},
                          {"edge_prob", o.edge_prob}}));
  out << "wrote " << (dir / "graph.json").string() << " (" << graph.size() << " nodes, "
      << graph.edges().size() << " edges)\n";
}

void cmd_gen_profile(Options o, std::ostream& out) {
  Graph graph = load_input("graph", o.graph_path, load_graph);
  if (!o.mem_means.empty()) {
    if (o.mem_means.size() != 4) throw Error(errc::kArgument, "--mem-means needs 4 values");
    o.params.mem_means = {o.mem_means[0], o.mem_means[1], o.mem_means[2], o.mem_means[3]};
  }
  if (!o.multipliers.empty()) o.params.core_multipliers = o.multipliers;
  CostModel cm = synth_profile(graph, o.params, o.seed);
  const fs::path dir(o.out_dir);
  save_profile(cm, dir / "profile.json");
  write_json(dir / "config.json",
             config_echo("gen-profile", o, {{"graph", o.graph_path}, {"params", to_json(o.params)}}));
  out << "wrote " << (dir / "profile.json").string() << '\n';
}

void cmd_plan(const Options& o, std::ostream& out) {
  auto [graph, cm] = load_pair(o.graph_path, o.profile_path);
  const EvalOptions eval_options{o.io_transfers};
  const Order order = topo_sort_hybrid(graph, cm);
  Plan plan = select_devices(graph, cm, order, o.alpha, eval_options);
  std::size_t crossings_before = count_crossings(graph, plan);
  json reduce = nullptr;
  if (!o.movement_threshold.empty()) {
    std::size_t threshold = default_movement_threshold(graph.size());
    if (o.movement_threshold != "auto") {
      try {
        threshold = std::stoul(o.movement_threshold);
      } catch (const std::exception&) {
        throw Error(errc::kArgument, "--movement-threshold takes an integer or \"auto\"");
      }
    }
    plan = reduce_movements(graph, cm, plan, threshold, eval_options);
    reduce = {{"threshold", threshold},
              {"crossings_before", crossings_before},
              {"crossings_after", count_crossings(graph, plan)}};
  }
  const EvalResult eval = evaluate(graph, cm, plan, eval_options);
  const fs::path dir(o.out_dir);
  save_plan(plan, dir / "plan.json");
  json eval_doc = to_json(eval);
  eval_doc["k_star"] = plan.k_star;
  eval_doc["alpha"] = plan.alpha;
  eval_doc["crossings"] = count_crossings(graph, plan);
  if (!reduce.is_null()) eval_doc["reduce_movements"] = reduce;
  write_json(dir / "eval.json", eval_doc);
  write_json(dir / "config.json",
             config_echo("plan", o,
                         {{"graph", o.graph_path},
                          {"profile", o.profile_path},
                          {"alpha", o.alpha},
                          {"io_transfers", o.io_transfers},
                          {"movement_threshold", o.movement_threshold}}));
  out << "k*=" << plan.k_star << " latency_L=" << eval.latency << " gpu_memory=" << eval.gpu_memory
      << " objective=" << eval.objective << '\n';
}

void cmd_sweep(const Options& o, std::ostream& out) {
  auto [graph, cm] = load_pair(o.graph_path, o.profile_path);
  const EvalOptions eval_options{o.io_transfers};
  const auto alphas = sweep_values(parse_alpha_sweep(o.alpha_sweep));
  const Order order = topo_sort_hybrid(graph, cm);

  std::vector<std::future<json>> points;
  for (double alpha : alphas) {
    points.push_back(std::async(std::launch::async, [&, alpha] {
      const Plan plan = select_devices(graph, cm, order, alpha, eval_options);
      const EvalResult eval = evaluate(graph, cm, plan, eval_options);
      return json{{"alpha", alpha}, {"latency_L", eval.latency}, {"gpu_memory", eval.gpu_memory},
                  {"k_star", plan.k_star}};
    }));
  }
  std::vector<json> rows;
  for (auto& p : points) rows.push_back(p.get());
  const auto baselines = baseline_plans(graph, cm, 0.0, eval_options);
  const EvalResult gpu = evaluate(graph, cm, baselines.all_gpu, eval_options);
  const EvalResult cpu = evaluate(graph, cm, baselines.all_cpu, eval_options);

  const fs::path dir(o.out_dir);
  write_stream(dir / "sweep.csv", [&](std::ostream& csv) {
    csv << "pattern,alpha,latency_L,gpu_memory,k_star\n";
    for (const auto& r : rows) {
      csv << "hybrid," << shortest(r["alpha"].get<double>()) << ',' << shortest(r["latency_L"].get<double>())
          << ',' << shortest(r["gpu_memory"].get<double>()) << ',' << r["k_star"].get<int>() << '\n';
    }
    csv << "gpu,," << shortest(gpu.latency) << ',' << shortest(gpu.gpu_memory) << ','
        << baselines.all_gpu.k_star << '\n';
    csv << "cpu,," << shortest(cpu.latency) << ',' << shortest(cpu.gpu_memory) << ','
        << baselines.all_cpu.k_star << '\n';
  });
  if (o.svg) {
    write_stream(dir / "sweep.svg",
                 [&](std::ostream& svg) { write_sweep_svg(rows, gpu.latency, cpu.latency, svg); });
  }
  write_json(dir / "config.json",
             config_echo("sweep", o,
                         {{"graph", o.graph_path},
                          {"profile", o.profile_path},
                          {"alpha_sweep", o.alpha_sweep},
                          {"io_transfers", o.io_transfers},
                          {"svg", o.svg}}));
  out << "wrote " << rows.size() << " sweep rows + 2 baseline rows to " << (dir / "sweep.csv").string() << '\n';
}

void cmd_simulate(const Options& o, std::ostream& out) {
  auto [graph, cm] = load_pair(o.graph_path, o.profile_path);
  const Plan plan = load_input("plan", o.plan_path, load_plan);
  const EvalOptions eval_options{o.io_transfers};
  const Trace trace = simulate(graph, cm, plan, o.pcie_contention, eval_options);
  const EvalResult eval = evaluate(graph, cm, plan, eval_options);
  const fs::path dir(o.out_dir);
  write_stream(dir / "trace.csv", [&](std::ostream& csv) { write_trace_csv(trace, csv); });
  if (o.svg) {
    write_stream(dir / "trace.svg", [&](std::ostream& svg) { write_gantt_svg(trace, graph, svg); });
  }
  write_json(dir / "summary.json", {{"makespan", trace.makespan},
                                    {"latency_L", eval.latency},
                                    {"transfers", trace.transfers.size()},
                                    {"pcie_contention", o.pcie_contention}});
  write_json(dir / "config.json",
             config_echo("simulate", o,
                         {{"graph", o.graph_path},
                          {"profile", o.profile_path},
                          {"plan", o.plan_path},
                          {"pcie_contention", o.pcie_contention},
                          {"io_transfers", o.io_transfers},
                          {"svg", o.svg}}));
  out << "makespan=" << trace.makespan << " latency_L=" << eval.latency << '\n';
}

void cmd_oracle_gap(const Options& o, std::ostream& out) {
  const auto corpus = random_gap_corpus(o.instances, o.max_nodes, o.max_cores, o.seed);
  OracleLimits limits;
  limits.max_nodes = std::max<std::size_t>(limits.max_nodes, o.max_nodes);
  const GapReport report = greedy_gap(corpus, limits);
  const fs::path dir(o.out_dir);
  write_json(dir / "gap.json", to_json(report));
  write_stream(dir / "gap.csv", [&](std::ostream& csv) { write_gap_csv(report, csv); });
  write_json(dir / "config.json",
             config_echo("oracle-gap", o,
                         {{"instances", o.instances}, {"max_nodes", o.max_nodes}, {"max_cores", o.max_cores}}));
  out << "instances=" << report.rows.size() << " median_ratio=" << report.quantiles.median
      << " max_ratio=" << report.quantiles.max << '\n';
}

void cmd_serve(const Options& o, std::ostream& out) {
  const Scenario scenario = load_input("scenario", o.scenario_path, [](const fs::path& path) {
    // An empty model list is a usage mistake rather than a malformed file.
    json doc;
    try {
      doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
      throw Error(errc::kFormat, e.what());
    }
    const bool no_models = !doc.contains("models") || (doc["models"].is_array() && doc["models"].empty());
    if (doc.is_object() && no_models && !doc.contains("patterns")) {
      throw Error(errc::kArgument, "scenario lists no models");
    }
    return scenario_from_json(doc);
  });
  const fs::path dir(o.out_dir);
  json metrics;
  if (!scenario.models.empty()) {
    const ServingRun run = run_serving(scenario.models, scenario.server, scenario.workload);
    metrics["models"] = to_json(run.metrics);
    write_stream(dir / "events.csv", [&](std::ostream& csv) { write_events_csv(run.events, csv); });
    out << "slo_violation=" << run.metrics.slo_violation() << " swapping_rate=" << run.metrics.swapping_rate()
        << '\n';
  }
  if (scenario.patterns) {
    const auto& p = *scenario.patterns;
    const PatternReport report =
        compare_patterns(p.gpu, p.latency_optimal, p.memory_optimal, scenario.server, scenario.workload);
    metrics["patterns"] = to_json(report)["patterns"];
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
      write_stream(dir / ("events_" + report.rows[i].pattern + ".csv"),
                   [&](std::ostream& csv) { write_events_csv(report.runs[i].events, csv); });
      out << report.rows[i].pattern << ": slo_violation=" << report.rows[i].metrics.slo_violation()
          << " swapping_rate=" << report.rows[i].metrics.swapping_rate() << '\n';
    }
  }
  write_json(dir / "metrics.json", metrics);
  write_json(dir / "config.json", config_echo("serve", o,
                                              {{"scenario", o.scenario_path},
                                               {"workload_seed", scenario.workload.seed}}));
}

void cmd_gen_scenario(const Options& o, std::ostream& out) {
  if (o.model_graphs.empty() || o.model_graphs.size() != o.model_profiles.size()) {
    throw Error(errc::kArgument, "gen-scenario needs matching --graph/--profile pairs");
  }
  const auto alphas = sweep_values(parse_alpha_sweep(o.alpha_sweep));
  PatternModels models;
  double total_gpu = 0.0;
  json derived = json::array();
  for (std::size_t m = 0; m < o.model_graphs.size(); ++m) {
    auto [graph, cm] = load_pair(o.model_graphs[m], o.model_profiles[m]);
    const auto d = derive_patterns("m" + std::to_string(m), graph, cm, alphas, o.slo_slack,
                                   EvalOptions{o.io_transfers});
    derived.push_back({{"graph", o.model_graphs[m]}, {"memory_optimal_alpha", d.memory_optimal_alpha}});
    for (std::size_t c = 0; c < o.copies; ++c) {
      const std::string id = "m" + std::to_string(m) + "_" + std::to_string(c);
      auto gpu = d.gpu, lat = d.latency_optimal, mem = d.memory_optimal;
      gpu.id = lat.id = mem.id = id;
      models.gpu.push_back(gpu);
      models.latency_optimal.push_back(lat);
      models.memory_optimal.push_back(mem);
      total_gpu += gpu.gpu_footprint_mb;
    }
  }
  Scenario scenario;
  double largest = 0.0;
  for (const auto& m : models.gpu) largest = std::max(largest, m.gpu_footprint_mb);
  scenario.server.capacity_mb = std::max(largest, total_gpu * o.capacity_fraction);
  scenario.workload.total_requests = o.requests;
  scenario.workload.seed = o.seed;
  scenario.workload.pattern = o.request_pattern == "random" ? RequestPattern::random : RequestPattern::uniform;
  scenario.patterns = std::move(models);
  const fs::path dir(o.out_dir);
  save_scenario(scenario, dir / "scenario.json");
  write_json(dir / "config.json",
             config_echo("gen-scenario", o,
                         {{"graphs", o.model_graphs},
                          {"profiles", o.model_profiles},
                          {"copies", o.copies},
                          {"capacity_fraction", o.capacity_fraction},
                          {"alpha_sweep", o.alpha_sweep},
                          {"slo_slack", o.slo_slack},
                          {"derived", derived}}));
  out << "wrote " << (dir / "scenario.json").string() << " capacity_mb=" << scenario.server.capacity_mb << '\n';
}

void print_error(std::ostream& err, const std::string& code, const std::string& message) {
  err << json{{"error", code}, {"message", message}}.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"heterogeneous CPU/GPU DAG partitioner"};
  app.require_subcommand(1);
  Options o;

  auto add_out = [&](CLI::App* cmd) { cmd->add_option("--out", o.out_dir, "output directory"); };
  auto add_seed = [&](CLI::App* cmd) { cmd->add_option("--seed", o.seed, "root seed"); };
  auto add_pair = [&](CLI::App* cmd) {
    cmd->add_option("--graph", o.graph_path, "graph JSON")->required();
    cmd->add_option("--profile", o.profile_path, "profile JSON")->required();
  };

  auto* gen_graph = app.add_subcommand("gen-graph", "generate a graph");
  gen_graph->add_option("--kind", o.kind, "lstm | demo7 | random")
      ->check(CLI::IsMember({"lstm", "demo7", "random"}));
  gen_graph->add_option("--layers", o.layers)->check(CLI::PositiveNumber);
  gen_graph->add_option("--seq-len", o.seq_len)->check(CLI::PositiveNumber);
  gen_graph->add_option("--nodes", o.nodes)->check(CLI::PositiveNumber);
  gen_graph->add_option("--edge-prob", o.edge_prob)->check(CLI::Range(0.0, 1.0));
  add_seed(gen_graph);
  add_out(gen_graph);

  auto* gen_profile = app.add_subcommand("gen-profile", "synthesize a profile for a graph");
  gen_profile->add_option("--graph", o.graph_path)->required();
  gen_profile->add_option("--gpu-mean", o.params.gpu_mean)->check(CLI::PositiveNumber);
  gen_profile->add_option("--cpu-mean", o.params.cpu_base_mean)->check(CLI::PositiveNumber);
  gen_profile->add_option("--slope", o.params.contention_slope)->check(CLI::NonNegativeNumber);
  gen_profile->add_option("--comm-mean", o.params.comm_mean)->check(CLI::PositiveNumber);
  gen_profile->add_option("--mem-means", o.mem_means, "input,output,ephemeral,weights")->delimiter(',');
  gen_profile->add_option("--bandwidth", o.params.bandwidth)->check(CLI::PositiveNumber);
  gen_profile->add_option("--cores", o.params.max_cores)->check(CLI::PositiveNumber);
  gen_profile->add_option("--multipliers", o.multipliers, "per-core-count CPU multipliers")->delimiter(',');
  add_seed(gen_profile);
  add_out(gen_profile);

  auto* plan = app.add_subcommand("plan", "plan a graph and evaluate it");
  add_pair(plan);
  plan->add_option("--alpha", o.alpha)->check(CLI::NonNegativeNumber);
  plan->add_flag("--io-transfers", o.io_transfers);
  plan->add_option("--movement-threshold", o.movement_threshold, "run the movement pass (integer or auto)");
  add_seed(plan);
  add_out(plan);

  auto* sweep = app.add_subcommand("sweep", "alpha sweep with baselines");
  add_pair(sweep);
  sweep->add_option("--alpha-sweep", o.alpha_sweep, "start:stop:step");
  sweep->add_flag("--io-transfers", o.io_transfers);
  sweep->add_flag("--svg", o.svg);
  add_seed(sweep);
  add_out(sweep);

  auto* sim = app.add_subcommand("simulate", "discrete-event run of a plan");
  add_pair(sim);
  sim->add_option("--plan", o.plan_path)->required();
  sim->add_flag("--pcie-contention", o.pcie_contention);
  sim->add_flag("--io-transfers", o.io_transfers);
  sim->add_flag("--svg", o.svg);
  add_seed(sim);
  add_out(sim);

  auto* gap = app.add_subcommand("oracle-gap", "greedy vs exhaustive optimum on random instances");
  gap->add_option("--instances", o.instances);
  gap->add_option("--max-nodes", o.max_nodes)->check(CLI::Range(1, 10));
  gap->add_option("--max-cores", o.max_cores)->check(CLI::Range(1, 16));
  add_seed(gap);
  add_out(gap);

  auto* serve = app.add_subcommand("serve", "serving simulation of a scenario");
  serve->add_option("--scenario", o.scenario_path)->required();
  add_seed(serve);
  add_out(serve);

  auto* gen_scenario = app.add_subcommand("gen-scenario", "derive GPU / latency / memory pattern models");
  gen_scenario->add_option("--graph", o.model_graphs)->required();
  gen_scenario->add_option("--profile", o.model_profiles)->required();
  gen_scenario->add_option("--copies", o.copies)->check(CLI::PositiveNumber);
  gen_scenario->add_option("--capacity-fraction", o.capacity_fraction)->check(CLI::PositiveNumber);
  gen_scenario->add_option("--requests", o.requests)->check(CLI::PositiveNumber);
  gen_scenario->add_option("--pattern", o.request_pattern)->check(CLI::IsMember({"uniform", "random"}));
  gen_scenario->add_option("--alpha-sweep", o.alpha_sweep, "start:stop:step");
  gen_scenario->add_option("--slo-slack", o.slo_slack)->check(CLI::PositiveNumber);
  gen_scenario->add_flag("--io-transfers", o.io_transfers);
  add_seed(gen_scenario);
  add_out(gen_scenario);

  std::vector<std::string> argv_storage;
  argv_storage.push_back("hetpart");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    print_error(err, "usage", e.what());
    return kUsage;
  }

  try {
    if (gen_graph->parsed()) cmd_gen_graph(o, out);
    else if (gen_profile->parsed()) cmd_gen_profile(o, out);
    else if (plan->parsed()) cmd_plan(o, out);
    else if (sweep->parsed()) cmd_sweep(o, out);
    else if (sim->parsed()) cmd_simulate(o, out);
    else if (gap->parsed()) cmd_oracle_gap(o, out);
    else if (serve->parsed()) cmd_serve(o, out);
    else if (gen_scenario->parsed()) cmd_gen_scenario(o, out);
  } catch (const Error& e) {
    const std::string& code = e.code();
    if (code == errc::kArgument) {
      print_error(err, "usage", e.what());
      return kUsage;
    }
    print_error(err, code, e.what());
    const bool missing = code.size() >= 10 && code.compare(code.size() - 10, 10, "-not-found") == 0;
    return missing ? kInputNotFound : kInvalidInput;
  } catch (const std::exception& e) {
    print_error(err, "internal", e.what());
    return kInvalidInput;
  }
  return kOk;
}

}  // namespace hetpart::cli
