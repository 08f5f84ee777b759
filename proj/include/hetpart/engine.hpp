#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hetpart/cost_model.hpp"
#include "hetpart/graph.hpp"
#include "hetpart/plan.hpp"

namespace hetpart {

struct EvalOptions {
  // Charge host->GPU input copies for GPU entry nodes (Mem.input / b) and
  // GPU->host output copies for GPU exit nodes (Mem.output / b).
  bool io_transfers = false;
};

struct EvalResult {
  std::vector<double> est;
  std::vector<double> eft;
  std::vector<double> aft;
  std::vector<double> node_memory;  // each node's GPU memory term
  double latency = 0.0;
  double gpu_memory = 0.0;
  double objective = 0.0;
};

// Incremental list-scheduling state: per-processor availability, actual
// finish times and GPU memory terms. The evaluator, the greedy selector, the
// oracle and the simulator all run their arithmetic through this one class,
// so objectives computed on different paths compare bit for bit.
class ScheduleState {
 public:
  ScheduleState(const Graph& graph, const CostModel& cm, EvalOptions options = {});

  // Clears placements; processors 0..active_cores become available at t = 0.
  void reset(int active_cores);
  int active_cores() const { return active_cores_; }

  double exec(NodeId v, ProcessorId p) const {
    return p == kGpu ? cm_->gpu_time(v) : cm_->cpu_time(v, active_cores_);
  }
  // max(avail[p], latest input arrival). Inputs crossing the CPU/GPU
  // boundary arrive at AFT(pred) + C / b.
  double start_time(NodeId v, ProcessorId p) const;
  // GPU memory the node adds when placed on p: its output, ephemeral and
  // weight tensors plus the outputs of CPU-resident predecessors.
  double memory_delta(NodeId v, ProcessorId p) const;
  // CPU core with the earliest finish time; ties go to the lowest id.
  ProcessorId earliest_core(NodeId v) const;

  void place(NodeId v, ProcessorId p, double start, double finish, double memory);

  bool placed(NodeId v) const { return processor_[v] >= 0; }
  ProcessorId processor(NodeId v) const { return processor_[v]; }
  double aft(NodeId v) const { return aft_[v]; }
  double est(NodeId v) const { return est_[v]; }
  double node_memory(NodeId v) const { return memory_[v]; }

  // Max over exits of AFT (plus output copy when io_transfers is set).
  double latency() const;
  // Sum of node memory terms in node-index order.
  double gpu_memory() const;

  double transfer_ms(NodeId v, std::size_t pred_slot) const { return pred_comm_[v][pred_slot]; }
  double input_copy_ms(NodeId v) const;
  double output_copy_ms(NodeId v) const;
  const Graph& graph() const { return *graph_; }
  const CostModel& cost_model() const { return *cm_; }
  const EvalOptions& options() const { return options_; }

 private:
  const Graph* graph_;
  const CostModel* cm_;
  EvalOptions options_;
  int active_cores_ = 0;
  std::vector<std::vector<double>> pred_comm_;  // aligned with graph.pred(v)
  std::vector<double> avail_;
  std::vector<ProcessorId> processor_;
  std::vector<double> est_;
  std::vector<double> aft_;
  std::vector<double> memory_;
};

inline bool crosses(ProcessorId a, ProcessorId b) { return (a == kGpu) != (b == kGpu); }

// Analytic evaluation of a plan. Throws Error(plan-mismatch).
EvalResult evaluate(const Graph& graph, const CostModel& cm, const Plan& plan,
                    EvalOptions options = {});

// Places GPU-class nodes on the GPU and CPU-class nodes on the earliest
// available core, walking `order` with `active_cores` cores. Reuses its
// buffers across calls; for k' = 0 every node must be GPU-class.
class PlanResolver {
 public:
  PlanResolver(const Graph& graph, const CostModel& cm, EvalOptions options = {});

  // Returns L + alpha * M and writes the resolved processors into `cores`.
  double resolve(std::span<const NodeId> order, std::span<const DeviceClass> classes,
                 int active_cores, double alpha, std::vector<ProcessorId>& cores);

 private:
  ScheduleState state_;
};

Plan resolve_plan(const Graph& graph, const CostModel& cm, const Order& order,
                  std::span<const DeviceClass> classes, int active_cores, double alpha,
                  EvalOptions options = {});

struct TraceNode {
  NodeId node = 0;
  ProcessorId device = 0;
  double start = 0.0;
  double end = 0.0;
};

// Host endpoints of input/output copies use id -1.
inline constexpr std::int64_t kHost = -1;

struct TraceTransfer {
  std::int64_t src = 0;
  std::int64_t dst = 0;
  double start = 0.0;
  double end = 0.0;
  double mb = 0.0;
};

struct Trace {
  std::vector<TraceNode> nodes;          // in node-index order
  std::vector<TraceTransfer> transfers;  // in start-time order
  int active_cores = 0;
  double makespan = 0.0;
};

// Event-driven execution of a plan. Each processor runs its nodes in plan
// order as soon as it is free and every input has arrived. Without
// contention transfers are independent delays and the makespan equals
// evaluate().latency exactly; with contention all transfers share one link,
// served FIFO by (request time, src, dst).
Trace simulate(const Graph& graph, const CostModel& cm, const Plan& plan,
               bool pcie_contention, EvalOptions options = {});

struct BaselinePlans {
  Plan all_gpu;
  Plan all_cpu;
};

// All-GPU and all-CPU plans over the hybrid order; the CPU plan uses the
// core count in 1..k with the lowest latency.
BaselinePlans baseline_plans(const Graph& graph, const CostModel& cm, double alpha = 0.0,
                             EvalOptions options = {});

nlohmann::json to_json(const EvalResult& result);

void write_trace_csv(const Trace& trace, std::ostream& out);
// One lane per processor plus one for the PCIe link.
void write_gantt_svg(const Trace& trace, const Graph& graph, std::ostream& out);

}  // namespace hetpart
