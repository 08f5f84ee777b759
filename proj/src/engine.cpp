#include "hetpart/engine.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>
#include <tuple>

#include "hetpart/error.hpp"
#include "hetpart/planner.hpp"

namespace hetpart {

ScheduleState::ScheduleState(const Graph& graph, const CostModel& cm, EvalOptions options)
    : graph_(&graph), cm_(&cm), options_(options) {
  if (graph.size() != cm.size()) {
    throw Error(errc::kValidation, "profile and graph disagree on node count");
  }
  const std::size_t n = graph.size();
  pred_comm_.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId m : graph.pred(v)) {
      pred_comm_[v].push_back(cm.transfer_mb(m, v) / cm.bandwidth());
    }
  }
  processor_.assign(n, -1);
  est_.assign(n, 0.0);
  aft_.assign(n, 0.0);
  memory_.assign(n, 0.0);
}

void ScheduleState::reset(int active_cores) {
  if (active_cores < 0 || active_cores > cm_->max_cores()) {
    throw Error(errc::kArgument, "active cores must lie in [0, k]");
  }
  active_cores_ = active_cores;
  avail_.assign(static_cast<std::size_t>(active_cores) + 1, 0.0);
  std::fill(processor_.begin(), processor_.end(), -1);
  std::fill(est_.begin(), est_.end(), 0.0);
  std::fill(aft_.begin(), aft_.end(), 0.0);
  std::fill(memory_.begin(), memory_.end(), 0.0);
}

double ScheduleState::input_copy_ms(NodeId v) const {
  return cm_->memory(v).input / cm_->bandwidth();
}

double ScheduleState::output_copy_ms(NodeId v) const {
  return cm_->memory(v).output / cm_->bandwidth();
}

double ScheduleState::start_time(NodeId v, ProcessorId p) const {
  double ready = 0.0;
  if (options_.io_transfers && p == kGpu && graph_->is_entry(v)) {
    ready = input_copy_ms(v);
  }
  const auto preds = graph_->pred(v);
  for (std::size_t slot = 0; slot < preds.size(); ++slot) {
    const NodeId m = preds[slot];
    const double arrival = crosses(processor_[m], p) ? aft_[m] + pred_comm_[v][slot] : aft_[m];
    ready = std::max(ready, arrival);
  }
  return std::max(avail_[static_cast<std::size_t>(p)], ready);
}

double ScheduleState::memory_delta(NodeId v, ProcessorId p) const {
  if (p != kGpu) return 0.0;
  const auto& mem = cm_->memory(v);
  double delta = mem.output + mem.ephemeral + mem.weights;
  for (NodeId m : graph_->pred(v)) {
    if (processor_[m] != kGpu) delta += cm_->memory(m).output;
  }
  return delta;
}

ProcessorId ScheduleState::earliest_core(NodeId v) const {
  ProcessorId best = 1;
  double best_finish = std::numeric_limits<double>::infinity();
  for (ProcessorId p = 1; p <= active_cores_; ++p) {
    const double finish = start_time(v, p) + exec(v, p);
    if (finish < best_finish) {
      best_finish = finish;
      best = p;
    }
  }
  return best;
}

void ScheduleState::place(NodeId v, ProcessorId p, double start, double finish, double memory) {
  processor_[v] = p;
  est_[v] = start;
  aft_[v] = finish;
  memory_[v] = memory;
  avail_[static_cast<std::size_t>(p)] = finish;
}

double ScheduleState::latency() const {
  double latency = 0.0;
  for (NodeId v = 0; v < graph_->size(); ++v) {
    if (!graph_->is_exit(v)) continue;
    double done = aft_[v];
    if (options_.io_transfers && processor_[v] == kGpu) done = aft_[v] + output_copy_ms(v);
    latency = std::max(latency, done);
  }
  return latency;
}

double ScheduleState::gpu_memory() const {
  double total = 0.0;
  for (double m : memory_) total += m;
  return total;
}

EvalResult evaluate(const Graph& graph, const CostModel& cm, const Plan& plan,
                    EvalOptions options) {
  check_plan(graph, cm, plan);
  ScheduleState state(graph, cm, options);
  state.reset(plan.k_star);
  EvalResult result;
  const std::size_t n = graph.size();
  result.est.resize(n);
  result.eft.resize(n);
  for (NodeId v : plan.order) {
    const ProcessorId p = plan.cores[v];
    const double start = state.start_time(v, p);
    const double finish = start + state.exec(v, p);
    state.place(v, p, start, finish, state.memory_delta(v, p));
    result.est[v] = start;
    result.eft[v] = finish;
  }
  result.aft = result.eft;
  result.node_memory.resize(n);
  for (NodeId v = 0; v < n; ++v) result.node_memory[v] = state.node_memory(v);
  result.latency = state.latency();
  result.gpu_memory = state.gpu_memory();
  result.objective = result.latency + plan.alpha * result.gpu_memory;
  return result;
}

PlanResolver::PlanResolver(const Graph& graph, const CostModel& cm, EvalOptions options)
    : state_(graph, cm, options) {}

double PlanResolver::resolve(std::span<const NodeId> order, std::span<const DeviceClass> classes,
                             int active_cores, double alpha, std::vector<ProcessorId>& cores) {
  state_.reset(active_cores);
  cores.assign(classes.size(), kGpu);
  for (NodeId v : order) {
    ProcessorId p = kGpu;
    if (classes[v] == DeviceClass::cpu) {
      if (active_cores == 0) {
        throw Error(errc::kArgument, "cpu-class node with zero active cores");
      }
      p = state_.earliest_core(v);
    }
    const double start = state_.start_time(v, p);
    const double finish = start + state_.exec(v, p);
    state_.place(v, p, start, finish, state_.memory_delta(v, p));
    cores[v] = p;
  }
  return state_.latency() + alpha * state_.gpu_memory();
}

Plan resolve_plan(const Graph& graph, const CostModel& cm, const Order& order,
                  std::span<const DeviceClass> classes, int active_cores, double alpha,
                  EvalOptions options) {
  if (classes.size() != graph.size()) {
    throw Error(errc::kArgument, "one device class per node required");
  }
  PlanResolver resolver(graph, cm, options);
  Plan plan;
  plan.order = order;
  plan.k_star = active_cores;
  plan.alpha = alpha;
  resolver.resolve(order, classes, active_cores, alpha, plan.cores);
  return plan;
}

namespace {

enum class EventKind { node_done, transfer_done };

struct Event {
  double time;
  std::uint64_t seq;
  EventKind kind;
  std::size_t id;  // node id or transfer index

  bool operator>(const Event& other) const {
    return std::tie(time, seq) > std::tie(other.time, other.seq);
  }
};

struct TransferJob {
  double request = 0.0;
  std::int64_t src = 0;
  std::int64_t dst = 0;
  double duration = 0.0;
  double mb = 0.0;
};

class Simulator {
 public:
  Simulator(const Graph& graph, const CostModel& cm, const Plan& plan, bool contention,
            EvalOptions options)
      : graph_(graph), plan_(plan), contention_(contention), state_(graph, cm, options) {
    state_.reset(plan.k_star);
    const std::size_t n = graph.size();
    queue_.resize(static_cast<std::size_t>(plan.k_star) + 1);
    for (NodeId v : plan.order) queue_[static_cast<std::size_t>(plan.cores[v])].push_back(v);
    head_.assign(queue_.size(), 0);
    busy_.assign(queue_.size(), false);
    device_free_.assign(queue_.size(), 0.0);
    pending_inputs_.resize(n);
    input_ready_.assign(n, 0.0);
    start_.assign(n, 0.0);
    done_.assign(n, false);
    exit_done_.assign(n, 0.0);
    for (NodeId v = 0; v < n; ++v) {
      pending_inputs_[v] = graph.pred(v).size();
      if (io_input(v)) ++pending_inputs_[v];
    }
  }

  Trace run() {
    for (NodeId v = 0; v < graph_.size(); ++v) {
      if (io_input(v)) {
        request({0.0, kHost, static_cast<std::int64_t>(v), state_.input_copy_ms(v),
                 state_.cost_model().memory(v).input});
      }
    }
    dispatch();
    while (!events_.empty()) {
      const double now = events_.top().time;
      while (!events_.empty() && events_.top().time == now) {
        Event ev = events_.top();
        events_.pop();
        if (ev.kind == EventKind::node_done) {
          finish_node(ev.id, ev.time);
        } else {
          finish_transfer(ev.id, ev.time);
        }
      }
      dispatch();
    }
    return collect();
  }

 private:
  bool io_input(NodeId v) const {
    return state_.options().io_transfers && graph_.is_entry(v) && plan_.cores[v] == kGpu;
  }
  bool io_output(NodeId v) const {
    return state_.options().io_transfers && graph_.is_exit(v) && plan_.cores[v] == kGpu;
  }

  void push(double time, EventKind kind, std::size_t id) {
    events_.push({time, next_seq_++, kind, id});
  }

  void request(TransferJob job) {
    jobs_.push_back(job);
    const std::size_t id = jobs_.size() - 1;
    if (contention_) {
      waiting_.insert({job.request, job.src, job.dst, id});
    } else {
      start_transfer(id, job.request);
    }
  }

  void start_transfer(std::size_t id, double start) {
    const TransferJob& job = jobs_[id];
    const double end = start + job.duration;
    transfers_.push_back({job.src, job.dst, start, end, job.mb});
    push(end, EventKind::transfer_done, id);
  }

  void arrive(NodeId v, double time) {
    input_ready_[v] = std::max(input_ready_[v], time);
    --pending_inputs_[v];
  }

  void finish_node(NodeId v, double time) {
    const auto p = static_cast<std::size_t>(plan_.cores[v]);
    busy_[p] = false;
    device_free_[p] = time;
    ++head_[p];
    done_[v] = true;
    exit_done_[v] = time;
    // Keep the shared state in step so transfer_ms / processor lookups work.
    state_.place(v, plan_.cores[v], start_[v], time, 0.0);
    for (NodeId c : graph_.succ(v)) {
      if (crosses(plan_.cores[v], plan_.cores[c])) {
        const auto preds = graph_.pred(c);
        const auto slot = static_cast<std::size_t>(
            std::lower_bound(preds.begin(), preds.end(), v) - preds.begin());
        request({time, static_cast<std::int64_t>(v), static_cast<std::int64_t>(c),
                 state_.transfer_ms(c, slot), state_.cost_model().transfer_mb(v, c)});
      } else {
        arrive(c, time);
      }
    }
    if (io_output(v)) {
      request({time, static_cast<std::int64_t>(v), kHost, state_.output_copy_ms(v),
               state_.cost_model().memory(v).output});
    }
  }

  void finish_transfer(std::size_t id, double time) {
    const TransferJob& job = jobs_[id];
    if (contention_) link_busy_ = false;
    if (job.dst == kHost) {
      exit_done_[static_cast<NodeId>(job.src)] = time;
    } else {
      arrive(static_cast<NodeId>(job.dst), time);
    }
  }

  void dispatch() {
    if (contention_ && !link_busy_ && !waiting_.empty()) {
      auto first = waiting_.begin();
      const std::size_t id = std::get<3>(*first);
      waiting_.erase(first);
      link_busy_ = true;
      start_transfer(id, std::max(jobs_[id].request, link_free_));
      link_free_ = transfers_.back().end;
    }
    for (std::size_t p = 0; p < queue_.size(); ++p) {
      if (busy_[p] || head_[p] >= queue_[p].size()) continue;
      const NodeId v = queue_[p][head_[p]];
      if (pending_inputs_[v] != 0) continue;
      const double start = std::max(device_free_[p], input_ready_[v]);
      const double finish = start + state_.exec(v, plan_.cores[v]);
      start_[v] = start;
      busy_[p] = true;
      push(finish, EventKind::node_done, v);
    }
  }

  Trace collect() {
    Trace trace;
    trace.active_cores = plan_.k_star;
    for (NodeId v = 0; v < graph_.size(); ++v) {
      if (!done_[v]) {
        throw std::logic_error("simulate: deadlock, node " + std::to_string(v) + " never ran");
      }
      trace.nodes.push_back({v, plan_.cores[v], start_[v], state_.aft(v)});
      if (graph_.is_exit(v)) trace.makespan = std::max(trace.makespan, exit_done_[v]);
    }
    trace.transfers = std::move(transfers_);
    std::stable_sort(trace.transfers.begin(), trace.transfers.end(),
                     [](const TraceTransfer& a, const TraceTransfer& b) {
                       return std::tie(a.start, a.src, a.dst) < std::tie(b.start, b.src, b.dst);
                     });
    return trace;
  }

  const Graph& graph_;
  const Plan& plan_;
  bool contention_;
  ScheduleState state_;

  std::vector<std::vector<NodeId>> queue_;
  std::vector<std::size_t> head_;
  std::vector<bool> busy_;
  std::vector<double> device_free_;
  std::vector<std::size_t> pending_inputs_;
  std::vector<double> input_ready_;
  std::vector<double> start_;
  std::vector<bool> done_;
  std::vector<double> exit_done_;

  std::vector<TransferJob> jobs_;
  std::vector<TraceTransfer> transfers_;
  std::set<std::tuple<double, std::int64_t, std::int64_t, std::size_t>> waiting_;
  bool link_busy_ = false;
  double link_free_ = 0.0;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::uint64_t next_seq_ = 0;
};

}  // namespace

Trace simulate(const Graph& graph, const CostModel& cm, const Plan& plan, bool pcie_contention,
               EvalOptions options) {
  check_plan(graph, cm, plan);
  return Simulator(graph, cm, plan, pcie_contention, options).run();
}

BaselinePlans baseline_plans(const Graph& graph, const CostModel& cm, double alpha,
                             EvalOptions options) {
  const Order order = topo_sort_hybrid(graph, cm);
  BaselinePlans out;
  out.all_gpu.order = order;
  out.all_gpu.cores.assign(graph.size(), kGpu);
  out.all_gpu.k_star = 0;
  out.all_gpu.alpha = alpha;

  const std::vector<DeviceClass> classes(graph.size(), DeviceClass::cpu);
  double best_latency = std::numeric_limits<double>::infinity();
  for (int cores = 1; cores <= cm.max_cores(); ++cores) {
    Plan candidate = resolve_plan(graph, cm, order, classes, cores, alpha, options);
    const double latency = evaluate(graph, cm, candidate, options).latency;
    if (latency < best_latency) {
      best_latency = latency;
      out.all_cpu = std::move(candidate);
    }
  }
  return out;
}

nlohmann::json to_json(const EvalResult& r) {
  return {{"est", r.est},
          {"eft", r.eft},
          {"aft", r.aft},
          {"node_memory", r.node_memory},
          {"latency_L", r.latency},
          {"gpu_memory", r.gpu_memory},
          {"objective", r.objective}};
}

}  // namespace hetpart
