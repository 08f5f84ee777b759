#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hetpart/cost_model.hpp"
#include "hetpart/graph.hpp"

namespace hetpart {

enum class DeviceClass : std::uint8_t { gpu = 0, cpu = 1 };

// Execution order: a permutation of node ids that respects every edge.
using Order = std::vector<NodeId>;

// Partition plan. cores[v] is the processor a node runs on: 0 for the GPU,
// 1..k_star for a CPU core. The device class of a node follows from it.
struct Plan {
  Order order;
  std::vector<ProcessorId> cores;
  int k_star = 0;
  double alpha = 0.0;

  DeviceClass device_class(NodeId v) const {
    return cores[v] == kGpu ? DeviceClass::gpu : DeviceClass::cpu;
  }
  std::vector<DeviceClass> selection() const;

  bool operator==(const Plan&) const = default;
};

// Empty when `order` is a permutation of 0..n-1 respecting every edge.
std::vector<std::string> order_violations(const Graph& graph, const Order& order);

// Order violations plus selection/core-count consistency against the graph
// and (when given) the cost model's k.
std::vector<std::string> plan_violations(const Graph& graph, const Plan& plan, int max_cores = -1);

// Throws Error(plan-mismatch) listing the violations.
void check_plan(const Graph& graph, const CostModel& cm, const Plan& plan);

// Number of edges whose endpoints run on different device classes.
std::size_t count_crossings(const Graph& graph, const Plan& plan);

nlohmann::json to_json(const Plan& plan);
Plan plan_from_json(const nlohmann::json& doc);
void save_plan(const Plan& plan, const std::filesystem::path& path);
Plan load_plan(const std::filesystem::path& path);

}  // namespace hetpart
