#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "hetpart/graph.hpp"

namespace hetpart {

// Processor ids: 0 is the GPU, 1..k are CPU cores.
using ProcessorId = int;
inline constexpr ProcessorId kGpu = 0;

// GPU memory (MB) a node needs when it runs on the GPU.
struct MemoryFootprint {
  double input = 0.0;
  double output = 0.0;
  double ephemeral = 0.0;
  double weights = 0.0;

  bool operator==(const MemoryFootprint&) const = default;
};

// Transfer size in MB along one edge.
struct Transfer {
  NodeId src = 0;
  NodeId dst = 0;
  double mb = 0.0;

  bool operator==(const Transfer&) const = default;
};

// Profiling data for one graph. Times are milliseconds, sizes megabytes,
// bandwidth MB/ms.
//
// Row i of the time table has k + 1 columns: column 0 is the GPU time and
// column j >= 1 is the per-operator CPU time while j cores are active.
class CostModel {
 public:
  // Throws Error(validation) on negative entries, b <= 0, k < 1, ragged
  // rows or repeated transfers.
  CostModel(int max_cores, double bandwidth, std::vector<std::vector<double>> times,
            std::vector<Transfer> transfers, std::vector<MemoryFootprint> memory);

  std::size_t size() const { return memory_.size(); }
  int max_cores() const { return max_cores_; }
  double bandwidth() const { return bandwidth_; }

  double gpu_time(NodeId v) const { return times_[v][0]; }
  double cpu_time(NodeId v, int active_cores) const { return times_[v][active_cores]; }
  std::span<const double> time_row(NodeId v) const { return times_.at(v); }
  const std::vector<std::vector<double>>& times() const { return times_; }

  // MB along (src, dst); 0 when no transfer is recorded.
  double transfer_mb(NodeId src, NodeId dst) const;
  // Sorted by (src, dst).
  const std::vector<Transfer>& transfers() const { return transfers_; }

  const MemoryFootprint& memory(NodeId v) const { return memory_.at(v); }
  const std::vector<MemoryFootprint>& memory() const { return memory_; }

  bool operator==(const CostModel&) const = default;

 private:
  int max_cores_;
  double bandwidth_;
  std::vector<std::vector<double>> times_;
  std::vector<Transfer> transfers_;
  std::vector<MemoryFootprint> memory_;
};

// Checks the model against a graph: same node count and transfers only on
// edges. Throws Error(validation).
void bind(const CostModel& cm, const Graph& graph);

// Execution time of `node` on `device` while `cores_in_use` CPU cores are
// active. The CPU column depends only on cores_in_use, never on which core.
double exec_time(const CostModel& cm, NodeId node, ProcessorId device, int cores_in_use);

// All CPU cores share host memory, so only GPU<->CPU edges pay C / b.
double comm_time(const Graph& graph, const CostModel& cm, NodeId src, NodeId dst,
                 bool cross_boundary);

struct ProfileParams {
  double gpu_mean = 1.0;
  double cpu_base_mean = 2.0;
  double contention_slope = 0.05;  // per extra active core
  double comm_mean = 1.0;
  MemoryFootprint mem_means{1.0, 1.0, 0.5, 4.0};
  double bandwidth = 12.0;
  int max_cores = 4;
  // Optional explicit multipliers for 1..k active cores; overrides the slope.
  std::optional<std::vector<double>> core_multipliers;
};

// Seeded synthetic profile. Per-node draws are uniform in [0.5, 1.5] x mean;
// W[i][j] = cpu_i * (1 + slope * (j - 1)) for j >= 1.
CostModel synth_profile(const Graph& graph, const ProfileParams& params, std::uint64_t seed);

nlohmann::json to_json(const CostModel& cm);
CostModel profile_from_json(const nlohmann::json& doc);
void save_profile(const CostModel& cm, const std::filesystem::path& path);
CostModel load_profile(const std::filesystem::path& path);

nlohmann::json to_json(const ProfileParams& params);
ProfileParams profile_params_from_json(const nlohmann::json& doc);

}  // namespace hetpart
