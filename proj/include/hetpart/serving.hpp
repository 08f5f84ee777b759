#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hetpart/cost_model.hpp"
#include "hetpart/engine.hpp"
#include "hetpart/graph.hpp"

namespace hetpart {

struct ModelEntry {
  std::string id;
  double gpu_footprint_mb = 0.0;  // GPU memory of the model's plan
  double exec_latency_ms = 0.0;
  double weights_mb = 0.0;        // payload moved on load / offload
  double slo_ms = 0.0;

  bool operator==(const ModelEntry&) const = default;
};

enum class RequestPattern { uniform, random };  // round-robin or seeded uniform draw
enum class ArrivalProcess { closed, periodic, poisson };
enum class EvictionPolicy { lru, fifo };

struct Workload {
  std::size_t total_requests = 1000;
  RequestPattern pattern = RequestPattern::uniform;
  std::uint64_t seed = 0;
  // closed: each request arrives when the previous one completes;
  // periodic: fixed gap; poisson: exponential gaps with the given mean.
  ArrivalProcess arrival = ArrivalProcess::closed;
  double interarrival_ms = 0.0;

  bool operator==(const Workload&) const = default;
};

struct ServerConfig {
  double capacity_mb = 0.0;
  double bandwidth = 12.0;  // MB/ms for loads and offloads
  EvictionPolicy eviction = EvictionPolicy::lru;

  bool operator==(const ServerConfig&) const = default;
};

struct ServingEvent {
  double t = 0.0;
  std::string event;  // arrive, evict, load, start, complete
  std::string model;
  std::string detail;
};

struct ServingMetrics {
  std::size_t invocations = 0;
  std::size_t violations = 0;
  std::size_t swaps = 0;
  std::size_t cold_loads = 0;
  std::size_t evictions = 0;
  double mean_latency_ms = 0.0;
  double p99_latency_ms = 0.0;

  double slo_violation() const {
    return invocations ? static_cast<double>(violations) / static_cast<double>(invocations) : 0.0;
  }
  double swapping_rate() const {
    return invocations ? static_cast<double>(swaps) / static_cast<double>(invocations) : 0.0;
  }
};

struct ServingRun {
  ServingMetrics metrics;
  std::vector<ServingEvent> events;  // time-ordered
};

// Single-GPU serving loop. Requests are served one at a time in arrival
// order. A request for a non-resident model evicts residents (by policy)
// until the model fits, then loads it; each eviction costs weights / b and
// the load costs weights / b. A load counts as a swap unless it is the
// model's first load and evicted nothing (a cold start). A request violates
// its SLO when wait + evictions + load + execution exceeds slo_ms.
ServingRun run_serving(std::span<const ModelEntry> models, const ServerConfig& server,
                       const Workload& workload);

struct PatternRow {
  std::string pattern;
  ServingMetrics metrics;
};

struct PatternReport {
  std::vector<PatternRow> rows;
  std::vector<ServingRun> runs;  // aligned with rows
};

inline constexpr const char* kPatternNames[] = {"gpu", "latency_optimal", "memory_optimal"};

// Runs the same workload against the three pattern variants of one model
// set. The lists must carry the same ids in the same order.
PatternReport compare_patterns(std::span<const ModelEntry> gpu,
                               std::span<const ModelEntry> latency_optimal,
                               std::span<const ModelEntry> memory_optimal,
                               const ServerConfig& server, const Workload& workload);

struct PatternModels {
  std::vector<ModelEntry> gpu;
  std::vector<ModelEntry> latency_optimal;
  std::vector<ModelEntry> memory_optimal;

  bool operator==(const PatternModels&) const = default;
};

struct PatternDerivation {
  ModelEntry gpu;
  ModelEntry latency_optimal;
  ModelEntry memory_optimal;
  double memory_optimal_alpha = 0.0;
};

// Builds one model's three serving entries from its graph and profile:
// all-GPU, alpha = 0, and the largest alpha in `alphas` whose latency does
// not exceed the all-GPU latency (falling back to alpha = 0). All three
// share slo = all-GPU latency * slo_slack. Load payload is the weight
// tensors of the GPU-resident nodes.
PatternDerivation derive_patterns(const std::string& id, const Graph& graph, const CostModel& cm,
                                  std::span<const double> alphas, double slo_slack = 1.25,
                                  EvalOptions options = {});

struct Scenario {
  ServerConfig server;
  Workload workload;
  std::vector<ModelEntry> models;         // single run
  std::optional<PatternModels> patterns;  // three-way comparison

  bool operator==(const Scenario&) const = default;
};

nlohmann::json to_json(const ModelEntry& model);
nlohmann::json to_json(const Workload& workload);
nlohmann::json to_json(const ServingMetrics& metrics);
nlohmann::json to_json(const PatternReport& report);
nlohmann::json to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& doc);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

// "t,event,model,detail" rows.
void write_events_csv(std::span<const ServingEvent> events, std::ostream& out);

}  // namespace hetpart
