#include "hetpart/serving.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "hetpart/error.hpp"
#include "hetpart/planner.hpp"
#include "hetpart/random.hpp"

namespace hetpart {

namespace {

std::string fmt(double x) {
  std::ostringstream out;
  out.precision(10);
  out << x;
  return out.str();
}

void check_models(std::span<const ModelEntry> models, const ServerConfig& server) {
  if (models.empty()) throw Error(errc::kValidation, "serving: model list is empty");
  if (!(server.capacity_mb > 0.0)) throw Error(errc::kValidation, "serving: capacity must be positive");
  if (!(server.bandwidth > 0.0)) throw Error(errc::kValidation, "serving: bandwidth must be positive");
  for (const auto& m : models) {
    if (!(m.gpu_footprint_mb >= 0.0) || !(m.weights_mb >= 0.0) || !(m.exec_latency_ms >= 0.0)) {
      throw Error(errc::kValidation, "serving: model " + m.id + " has a negative size or latency");
    }
    if (!(m.slo_ms > 0.0)) throw Error(errc::kValidation, "serving: model " + m.id + " needs slo > 0");
    if (m.gpu_footprint_mb > server.capacity_mb) {
      throw Error(errc::kValidation, "serving: model " + m.id + " needs " + fmt(m.gpu_footprint_mb) +
                                         " MB, more than the capacity of " + fmt(server.capacity_mb));
    }
  }
}

struct Resident {
  double last_used = 0.0;
  std::uint64_t loaded_seq = 0;
};

}  // namespace

ServingRun run_serving(std::span<const ModelEntry> models, const ServerConfig& server,
                       const Workload& workload) {
  check_models(models, server);
  if (workload.total_requests == 0) throw Error(errc::kValidation, "serving: total_requests must be >= 1");
  if (workload.arrival != ArrivalProcess::closed && !(workload.interarrival_ms > 0.0)) {
    throw Error(errc::kValidation, "serving: periodic/poisson arrivals need interarrival_ms > 0");
  }

  Rng rng(workload.seed);
  ServingRun run;
  auto& events = run.events;
  auto& metrics = run.metrics;

  std::map<std::size_t, Resident> resident;  // model index -> state
  std::vector<bool> ever_loaded(models.size(), false);
  double resident_mb = 0.0;
  double gpu_free = 0.0;
  double arrival = 0.0;
  std::uint64_t load_seq = 0;
  std::vector<double> latencies;
  latencies.reserve(workload.total_requests);

  for (std::size_t r = 0; r < workload.total_requests; ++r) {
    const std::size_t mi = workload.pattern == RequestPattern::uniform
                               ? r % models.size()
                               : uniform_int(rng, 0, models.size() - 1);
    const ModelEntry& model = models[mi];
    switch (workload.arrival) {
      case ArrivalProcess::closed: arrival = gpu_free; break;
      case ArrivalProcess::periodic: arrival = static_cast<double>(r) * workload.interarrival_ms; break;
      case ArrivalProcess::poisson:
        if (r > 0) arrival += -std::log(1.0 - uniform01(rng)) * workload.interarrival_ms;
        break;
    }
    events.push_back({arrival, "arrive", model.id, "request=" + std::to_string(r)});

    double t = std::max(arrival, gpu_free);
    if (!resident.contains(mi)) {
      bool evicted_any = false;
      while (!resident.empty() && resident_mb + model.gpu_footprint_mb > server.capacity_mb) {
        auto victim = resident.begin();
        for (auto it = resident.begin(); it != resident.end(); ++it) {
          const bool older = server.eviction == EvictionPolicy::lru
                                 ? it->second.last_used < victim->second.last_used
                                 : it->second.loaded_seq < victim->second.loaded_seq;
          if (older) victim = it;
        }
        const ModelEntry& out = models[victim->first];
        resident.erase(victim);
        resident_mb = 0.0;
        for (const auto& [index, state] : resident) resident_mb += models[index].gpu_footprint_mb;
        t += out.weights_mb / server.bandwidth;
        evicted_any = true;
        ++metrics.evictions;
        events.push_back({t, "evict", out.id, "resident_mb=" + fmt(resident_mb)});
      }
      const bool cold = !ever_loaded[mi] && !evicted_any;
      ever_loaded[mi] = true;
      t += model.weights_mb / server.bandwidth;
      resident_mb += model.gpu_footprint_mb;
      resident[mi] = {t, load_seq++};
      if (cold) {
        ++metrics.cold_loads;
      } else {
        ++metrics.swaps;
      }
      events.push_back({t, "load", model.id,
                        std::string(cold ? "cold" : "swap") + ";resident_mb=" + fmt(resident_mb)});
    }
    events.push_back({t, "start", model.id, "request=" + std::to_string(r)});
    const double finish = t + model.exec_latency_ms;
    resident[mi].last_used = finish;
    gpu_free = finish;
    const double latency = finish - arrival;
    const bool violated = latency > model.slo_ms;
    if (violated) ++metrics.violations;
    ++metrics.invocations;
    latencies.push_back(latency);
    events.push_back({finish, "complete", model.id,
                      "latency_ms=" + fmt(latency) + ";violation=" + (violated ? "1" : "0")});
  }

  std::stable_sort(events.begin(), events.end(),
                   [](const ServingEvent& a, const ServingEvent& b) { return a.t < b.t; });
  double sum = 0.0;
  for (double l : latencies) sum += l;
  metrics.mean_latency_ms = sum / static_cast<double>(latencies.size());
  std::sort(latencies.begin(), latencies.end());
  const auto rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(latencies.size())));
  metrics.p99_latency_ms = latencies[std::max<std::size_t>(rank, 1) - 1];
  return run;
}

PatternReport compare_patterns(std::span<const ModelEntry> gpu,
                               std::span<const ModelEntry> latency_optimal,
                               std::span<const ModelEntry> memory_optimal,
                               const ServerConfig& server, const Workload& workload) {
  const std::span<const ModelEntry> lists[] = {gpu, latency_optimal, memory_optimal};
  for (const auto& list : lists) {
    bool same = list.size() == gpu.size();
    for (std::size_t i = 0; same && i < list.size(); ++i) same = list[i].id == gpu[i].id;
    if (!same) {
      throw Error(errc::kValidation, "compare_patterns: pattern lists carry different model ids");
    }
  }
  PatternReport report;
  for (std::size_t i = 0; i < 3; ++i) {
    ServingRun run = run_serving(lists[i], server, workload);
    report.rows.push_back({kPatternNames[i], run.metrics});
    report.runs.push_back(std::move(run));
  }
  return report;
}

namespace {

ModelEntry entry_for(const std::string& id, const Graph& graph, const CostModel& cm,
                     const Plan& plan, EvalOptions options) {
  const EvalResult eval = evaluate(graph, cm, plan, options);
  double weights = 0.0;
  for (NodeId v = 0; v < graph.size(); ++v) {
    if (plan.cores[v] == kGpu) weights += cm.memory(v).weights;
  }
  return {id, eval.gpu_memory, eval.latency, weights, 0.0};
}

}  // namespace

PatternDerivation derive_patterns(const std::string& id, const Graph& graph, const CostModel& cm,
                                  std::span<const double> alphas, double slo_slack,
                                  EvalOptions options) {
  if (!(slo_slack > 0.0)) throw Error(errc::kArgument, "slo slack must be positive");
  const Order order = topo_sort_hybrid(graph, cm);
  Plan gpu_plan;
  gpu_plan.order = order;
  gpu_plan.cores.assign(graph.size(), kGpu);

  PatternDerivation out;
  out.gpu = entry_for(id, graph, cm, gpu_plan, options);
  const Plan latency_plan = select_devices(graph, cm, order, 0.0, options);
  out.latency_optimal = entry_for(id, graph, cm, latency_plan, options);
  out.memory_optimal = out.latency_optimal;

  std::vector<double> sorted(alphas.begin(), alphas.end());
  std::sort(sorted.begin(), sorted.end());
  for (double alpha : sorted) {
    const Plan plan = select_devices(graph, cm, order, alpha, options);
    ModelEntry entry = entry_for(id, graph, cm, plan, options);
    if (entry.exec_latency_ms <= out.gpu.exec_latency_ms) {
      out.memory_optimal = entry;
      out.memory_optimal_alpha = alpha;
    }
  }
  const double slo = out.gpu.exec_latency_ms * slo_slack;
  out.gpu.slo_ms = out.latency_optimal.slo_ms = out.memory_optimal.slo_ms = slo;
  return out;
}

namespace {

const char* to_string(RequestPattern p) { return p == RequestPattern::uniform ? "uniform" : "random"; }
const char* to_string(ArrivalProcess a) {
  switch (a) {
    case ArrivalProcess::closed: return "closed";
    case ArrivalProcess::periodic: return "periodic";
    case ArrivalProcess::poisson: return "poisson";
  }
  return "closed";
}
const char* to_string(EvictionPolicy e) { return e == EvictionPolicy::lru ? "lru" : "fifo"; }

RequestPattern pattern_from(const std::string& s) {
  if (s == "uniform") return RequestPattern::uniform;
  if (s == "random") return RequestPattern::random;
  throw Error(errc::kFormat, "scenario: unknown pattern \"" + s + "\"");
}
ArrivalProcess arrival_from(const std::string& s) {
  if (s == "closed") return ArrivalProcess::closed;
  if (s == "periodic") return ArrivalProcess::periodic;
  if (s == "poisson") return ArrivalProcess::poisson;
  throw Error(errc::kFormat, "scenario: unknown arrival process \"" + s + "\"");
}
EvictionPolicy eviction_from(const std::string& s) {
  if (s == "lru") return EvictionPolicy::lru;
  if (s == "fifo") return EvictionPolicy::fifo;
  throw Error(errc::kFormat, "scenario: unknown eviction policy \"" + s + "\"");
}

nlohmann::json models_json(const std::vector<ModelEntry>& models) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& m : models) out.push_back(to_json(m));
  return out;
}

std::vector<ModelEntry> models_from(const nlohmann::json& doc) {
  if (!doc.is_array()) throw Error(errc::kFormat, "scenario: model list must be an array");
  std::vector<ModelEntry> out;
  for (const auto& m : doc) {
    for (const char* key : {"id", "gpu_footprint_mb", "exec_latency_ms", "weights_mb", "slo_ms"}) {
      if (!m.contains(key)) throw Error(errc::kFormat, std::string("scenario: model missing \"") + key + "\"");
    }
    out.push_back({m.at("id").get<std::string>(), m.at("gpu_footprint_mb").get<double>(),
                   m.at("exec_latency_ms").get<double>(), m.at("weights_mb").get<double>(),
                   m.at("slo_ms").get<double>()});
  }
  return out;
}

}  // namespace

nlohmann::json to_json(const ModelEntry& m) {
  return {{"id", m.id},
          {"gpu_footprint_mb", m.gpu_footprint_mb},
          {"exec_latency_ms", m.exec_latency_ms},
          {"weights_mb", m.weights_mb},
          {"slo_ms", m.slo_ms}};
}

nlohmann::json to_json(const Workload& w) {
  return {{"total_requests", w.total_requests},
          {"pattern", to_string(w.pattern)},
          {"seed", w.seed},
          {"arrival", to_string(w.arrival)},
          {"interarrival_ms", w.interarrival_ms}};
}

nlohmann::json to_json(const ServingMetrics& m) {
  return {{"invocations", m.invocations},
          {"violations", m.violations},
          {"swaps", m.swaps},
          {"cold_loads", m.cold_loads},
          {"evictions", m.evictions},
          {"slo_violation", m.slo_violation()},
          {"swapping_rate", m.swapping_rate()},
          {"mean_latency_ms", m.mean_latency_ms},
          {"p99_latency_ms", m.p99_latency_ms}};
}

nlohmann::json to_json(const PatternReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    auto entry = to_json(row.metrics);
    entry["pattern"] = row.pattern;
    rows.push_back(std::move(entry));
  }
  return {{"patterns", std::move(rows)}};
}

nlohmann::json to_json(const Scenario& s) {
  nlohmann::json doc = {{"capacity_mb", s.server.capacity_mb},
                        {"bandwidth", s.server.bandwidth},
                        {"eviction", to_string(s.server.eviction)},
                        {"workload", to_json(s.workload)}};
  if (!s.models.empty()) doc["models"] = models_json(s.models);
  if (s.patterns) {
    doc["patterns"] = {{"gpu", models_json(s.patterns->gpu)},
                       {"latency_optimal", models_json(s.patterns->latency_optimal)},
                       {"memory_optimal", models_json(s.patterns->memory_optimal)}};
  }
  return doc;
}

Scenario scenario_from_json(const nlohmann::json& doc) {
  try {
    Scenario s;
    if (!doc.contains("capacity_mb")) throw Error(errc::kFormat, "scenario missing \"capacity_mb\"");
    s.server.capacity_mb = doc.at("capacity_mb").get<double>();
    s.server.bandwidth = doc.value("bandwidth", s.server.bandwidth);
    s.server.eviction = eviction_from(doc.value("eviction", std::string("lru")));
    if (doc.contains("workload")) {
      const auto& w = doc.at("workload");
      s.workload.total_requests = w.value("total_requests", s.workload.total_requests);
      s.workload.pattern = pattern_from(w.value("pattern", std::string("uniform")));
      s.workload.seed = w.value("seed", s.workload.seed);
      s.workload.arrival = arrival_from(w.value("arrival", std::string("closed")));
      s.workload.interarrival_ms = w.value("interarrival_ms", s.workload.interarrival_ms);
    }
    if (doc.contains("models")) s.models = models_from(doc.at("models"));
    if (doc.contains("patterns")) {
      const auto& p = doc.at("patterns");
      PatternModels pm;
      for (const char* key : kPatternNames) {
        if (!p.contains(key)) throw Error(errc::kFormat, std::string("scenario patterns missing \"") + key + "\"");
      }
      pm.gpu = models_from(p.at("gpu"));
      pm.latency_optimal = models_from(p.at("latency_optimal"));
      pm.memory_optimal = models_from(p.at("memory_optimal"));
      s.patterns = std::move(pm);
    }
    if (s.models.empty() && !s.patterns) {
      throw Error(errc::kValidation, "scenario has no models");
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::kFormat, std::string("scenario json: ") + e.what());
  }
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  write_text_file_atomic(path, to_json(scenario).dump(1) + "\n");
}

Scenario load_scenario(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(errc::kFormat, path.string() + ": " + e.what());
  }
  return scenario_from_json(doc);
}

void write_events_csv(std::span<const ServingEvent> events, std::ostream& out) {
  const auto old_precision = out.precision(17);
  out << "t,event,model,detail\n";
  for (const auto& e : events) out << e.t << ',' << e.event << ',' << e.model << ',' << e.detail << '\n';
  out.precision(old_precision);
}

}  // namespace hetpart
