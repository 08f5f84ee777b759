#include "hetpart/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hetpart/error.hpp"
#include "hetpart/random.hpp"

namespace hetpart {

namespace {

bool non_negative(double x) { return std::isfinite(x) && x >= 0.0; }

bool transfer_key_less(const Transfer& a, const Transfer& b) {
  return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
}

}  // namespace

CostModel::CostModel(int max_cores, double bandwidth, std::vector<std::vector<double>> times,
                     std::vector<Transfer> transfers, std::vector<MemoryFootprint> memory)
    : max_cores_(max_cores),
      bandwidth_(bandwidth),
      times_(std::move(times)),
      transfers_(std::move(transfers)),
      memory_(std::move(memory)) {
  if (max_cores_ < 1) {
    throw Error(errc::kValidation, "profile: k must be >= 1");
  }
  if (!(std::isfinite(bandwidth_) && bandwidth_ > 0.0)) {
    throw Error(errc::kValidation, "profile: bandwidth must be positive");
  }
  if (times_.size() != memory_.size()) {
    throw Error(errc::kValidation, "profile: W has " + std::to_string(times_.size()) +
                                       " rows but Mem has " + std::to_string(memory_.size()));
  }
  const auto cols = static_cast<std::size_t>(max_cores_) + 1;
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (times_[i].size() != cols) {
      throw Error(errc::kValidation, "profile: W row " + std::to_string(i) + " has " +
                                         std::to_string(times_[i].size()) + " columns, expected k+1 = " +
                                         std::to_string(cols));
    }
    if (!std::all_of(times_[i].begin(), times_[i].end(), non_negative)) {
      throw Error(errc::kValidation, "profile: negative time in W row " + std::to_string(i));
    }
    const auto& m = memory_[i];
    if (!(non_negative(m.input) && non_negative(m.output) && non_negative(m.ephemeral) &&
          non_negative(m.weights))) {
      throw Error(errc::kValidation, "profile: negative memory in Mem row " + std::to_string(i));
    }
  }
  std::sort(transfers_.begin(), transfers_.end(), transfer_key_less);
  for (std::size_t i = 0; i < transfers_.size(); ++i) {
    const auto& t = transfers_[i];
    if (!non_negative(t.mb)) {
      throw Error(errc::kValidation, "profile: negative transfer size");
    }
    if (t.src >= size() || t.dst >= size() || t.src == t.dst) {
      throw Error(errc::kValidation, "profile: transfer (" + std::to_string(t.src) + "," +
                                         std::to_string(t.dst) + ") is out of range");
    }
    if (i > 0 && transfers_[i - 1].src == t.src && transfers_[i - 1].dst == t.dst) {
      throw Error(errc::kValidation, "profile: repeated transfer entry");
    }
  }
}

double CostModel::transfer_mb(NodeId src, NodeId dst) const {
  Transfer key{src, dst, 0.0};
  auto it = std::lower_bound(transfers_.begin(), transfers_.end(), key, transfer_key_less);
  if (it != transfers_.end() && it->src == src && it->dst == dst) return it->mb;
  return 0.0;
}

void bind(const CostModel& cm, const Graph& graph) {
  if (cm.size() != graph.size()) {
    throw Error(errc::kValidation, "profile has " + std::to_string(cm.size()) +
                                       " nodes, graph has " + std::to_string(graph.size()));
  }
  for (const auto& t : cm.transfers()) {
    if (t.mb > 0.0 && !graph.has_edge(t.src, t.dst)) {
      throw Error(errc::kValidation, "profile has a transfer on non-edge (" +
                                         std::to_string(t.src) + "," + std::to_string(t.dst) + ")");
    }
  }
}

double exec_time(const CostModel& cm, NodeId node, ProcessorId device, int cores_in_use) {
  if (node >= cm.size()) throw Error(errc::kArgument, "exec_time: node out of range");
  if (device == kGpu) return cm.gpu_time(node);
  if (cores_in_use < 1 || cores_in_use > cm.max_cores()) {
    throw Error(errc::kArgument, "exec_time: cores in use must lie in [1, k]");
  }
  if (device < 1 || device > cores_in_use) {
    throw Error(errc::kArgument, "exec_time: core id " + std::to_string(device) +
                                     " exceeds active cores " + std::to_string(cores_in_use));
  }
  return cm.cpu_time(node, cores_in_use);
}

double comm_time(const Graph& graph, const CostModel& cm, NodeId src, NodeId dst,
                 bool cross_boundary) {
  if (!graph.has_edge(src, dst)) {
    throw Error(errc::kArgument, "comm_time: (" + std::to_string(src) + "," +
                                     std::to_string(dst) + ") is not an edge");
  }
  return cross_boundary ? cm.transfer_mb(src, dst) / cm.bandwidth() : 0.0;
}

CostModel synth_profile(const Graph& graph, const ProfileParams& params, std::uint64_t seed) {
  const double means[] = {params.gpu_mean, params.cpu_base_mean, params.comm_mean,
                          params.mem_means.input, params.mem_means.output,
                          params.mem_means.ephemeral, params.mem_means.weights,
                          params.bandwidth};
  for (double m : means) {
    if (!(std::isfinite(m) && m > 0.0)) {
      throw Error(errc::kArgument, "synth_profile: means and bandwidth must be positive");
    }
  }
  if (params.contention_slope < 0.0) {
    throw Error(errc::kArgument, "synth_profile: contention slope must be >= 0");
  }
  if (params.max_cores < 1) throw Error(errc::kArgument, "synth_profile: k must be >= 1");
  const auto k = static_cast<std::size_t>(params.max_cores);

  std::vector<double> multiplier(k + 1, 1.0);
  if (params.core_multipliers) {
    const auto& table = *params.core_multipliers;
    if (table.size() != k) {
      throw Error(errc::kArgument, "synth_profile: need one multiplier per core count 1..k");
    }
    for (std::size_t j = 1; j <= k; ++j) {
      if (!(table[j - 1] > 0.0)) throw Error(errc::kArgument, "synth_profile: multipliers must be positive");
      multiplier[j] = table[j - 1];
    }
  } else {
    for (std::size_t j = 1; j <= k; ++j) {
      multiplier[j] = 1.0 + params.contention_slope * static_cast<double>(j - 1);
    }
  }

  Rng rng(seed);
  const std::size_t n = graph.size();
  std::vector<std::vector<double>> times(n, std::vector<double>(k + 1));
  std::vector<MemoryFootprint> memory(n);
  for (NodeId i = 0; i < n; ++i) {
    times[i][0] = around(rng, params.gpu_mean);
    const double cpu = around(rng, params.cpu_base_mean);
    for (std::size_t j = 1; j <= k; ++j) times[i][j] = cpu * multiplier[j];
    memory[i] = {around(rng, params.mem_means.input), around(rng, params.mem_means.output),
                 around(rng, params.mem_means.ephemeral), around(rng, params.mem_means.weights)};
  }
  std::vector<Transfer> transfers;
  transfers.reserve(graph.edges().size());
  for (const auto& e : graph.edges()) {
    transfers.push_back({e.src, e.dst, around(rng, params.comm_mean)});
  }
  return CostModel(params.max_cores, params.bandwidth, std::move(times), std::move(transfers),
                   std::move(memory));
}

nlohmann::json to_json(const CostModel& cm) {
  nlohmann::json transfers = nlohmann::json::array();
  for (const auto& t : cm.transfers()) transfers.push_back({t.src, t.dst, t.mb});
  nlohmann::json mem = nlohmann::json::array();
  for (const auto& m : cm.memory()) mem.push_back({m.input, m.output, m.ephemeral, m.weights});
  return {{"n", cm.size()}, {"k", cm.max_cores()}, {"b", cm.bandwidth()},
          {"W", cm.times()},  {"C", std::move(transfers)}, {"Mem", std::move(mem)}};
}

CostModel profile_from_json(const nlohmann::json& doc) {
  try {
    for (const char* key : {"k", "b", "W", "C", "Mem"}) {
      if (!doc.contains(key)) {
        throw Error(errc::kFormat, std::string("profile json missing \"") + key + "\"");
      }
    }
    auto times = doc.at("W").get<std::vector<std::vector<double>>>();
    if (doc.contains("n") && doc.at("n").get<std::size_t>() != times.size()) {
      throw Error(errc::kValidation, "profile json: W row count does not match n");
    }
    std::vector<Transfer> transfers;
    for (const auto& row : doc.at("C")) {
      if (!row.is_array() || row.size() != 3) {
        throw Error(errc::kFormat, "profile json: C entries must be [src, dst, mb]");
      }
      if (row[0].get<long long>() < 0 || row[1].get<long long>() < 0) {
        throw Error(errc::kValidation, "profile json: negative node index in C");
      }
      transfers.push_back({row[0].get<NodeId>(), row[1].get<NodeId>(), row[2].get<double>()});
    }
    std::vector<MemoryFootprint> memory;
    for (const auto& row : doc.at("Mem")) {
      if (!row.is_array() || row.size() != 4) {
        throw Error(errc::kFormat, "profile json: Mem rows must have 4 columns");
      }
      memory.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>(),
                        row[3].get<double>()});
    }
    return CostModel(doc.at("k").get<int>(), doc.at("b").get<double>(), std::move(times),
                     std::move(transfers), std::move(memory));
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::kFormat, std::string("profile json: ") + e.what());
  }
}

void save_profile(const CostModel& cm, const std::filesystem::path& path) {
  write_text_file_atomic(path, to_json(cm).dump(1) + "\n");
}

CostModel load_profile(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(errc::kFormat, path.string() + ": " + e.what());
  }
  return profile_from_json(doc);
}

nlohmann::json to_json(const ProfileParams& p) {
  nlohmann::json doc = {
      {"gpu_mean", p.gpu_mean},
      {"cpu_base_mean", p.cpu_base_mean},
      {"contention_slope", p.contention_slope},
      {"comm_mean", p.comm_mean},
      {"mem_means", {p.mem_means.input, p.mem_means.output, p.mem_means.ephemeral, p.mem_means.weights}},
      {"b", p.bandwidth},
      {"k", p.max_cores},
  };
  if (p.core_multipliers) doc["core_multipliers"] = *p.core_multipliers;
  return doc;
}

ProfileParams profile_params_from_json(const nlohmann::json& doc) {
  ProfileParams p;
  try {
    p.gpu_mean = doc.value("gpu_mean", p.gpu_mean);
    p.cpu_base_mean = doc.value("cpu_base_mean", p.cpu_base_mean);
    p.contention_slope = doc.value("contention_slope", p.contention_slope);
    p.comm_mean = doc.value("comm_mean", p.comm_mean);
    if (doc.contains("mem_means")) {
      auto m = doc.at("mem_means").get<std::vector<double>>();
      if (m.size() != 4) throw Error(errc::kFormat, "mem_means needs 4 values");
      p.mem_means = {m[0], m[1], m[2], m[3]};
    }
    p.bandwidth = doc.value("b", p.bandwidth);
    p.max_cores = doc.value("k", p.max_cores);
    if (doc.contains("core_multipliers")) {
      p.core_multipliers = doc.at("core_multipliers").get<std::vector<double>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::kFormat, std::string("profile params: ") + e.what());
  }
  return p;
}

}  // namespace hetpart
