#include "hetpart/plan.hpp"

#include <sstream>

#include "hetpart/error.hpp"

namespace hetpart {

std::vector<DeviceClass> Plan::selection() const {
  std::vector<DeviceClass> out;
  out.reserve(cores.size());
  for (NodeId v = 0; v < cores.size(); ++v) out.push_back(device_class(v));
  return out;
}

std::vector<std::string> order_violations(const Graph& graph, const Order& order) {
  std::vector<std::string> out;
  const std::size_t n = graph.size();
  if (order.size() != n) {
    out.push_back("order has " + std::to_string(order.size()) + " entries, graph has " +
                  std::to_string(n) + " nodes");
    return out;
  }
  constexpr std::size_t kMissing = static_cast<std::size_t>(-1);
  std::vector<std::size_t> position(n, kMissing);
  for (std::size_t p = 0; p < n; ++p) {
    const NodeId v = order[p];
    if (v >= n) {
      out.push_back("order entry " + std::to_string(v) + " out of range");
    } else if (position[v] != kMissing) {
      out.push_back("node " + std::to_string(v) + " appears twice in order");
    } else {
      position[v] = p;
    }
  }
  if (!out.empty()) return out;
  for (const auto& e : graph.edges()) {
    if (position[e.src] >= position[e.dst]) {
      out.push_back("edge (" + std::to_string(e.src) + "," + std::to_string(e.dst) +
                    ") runs against the order");
    }
  }
  return out;
}

std::vector<std::string> plan_violations(const Graph& graph, const Plan& plan, int max_cores) {
  auto out = order_violations(graph, plan.order);
  if (plan.cores.size() != graph.size()) {
    out.push_back("plan has " + std::to_string(plan.cores.size()) + " selections for " +
                  std::to_string(graph.size()) + " nodes");
    return out;
  }
  if (plan.k_star < 0 || (max_cores >= 0 && plan.k_star > max_cores)) {
    out.push_back("k_star " + std::to_string(plan.k_star) + " outside [0, " +
                  std::to_string(max_cores) + "]");
  }
  for (NodeId v = 0; v < plan.cores.size(); ++v) {
    const int core = plan.cores[v];
    if (core < 0 || core > plan.k_star) {
      out.push_back("node " + std::to_string(v) + " on core " + std::to_string(core) +
                    " outside [0, k_star]");
    }
  }
  if (!(plan.alpha >= 0.0)) out.push_back("alpha must be >= 0");
  return out;
}

void check_plan(const Graph& graph, const CostModel& cm, const Plan& plan) {
  auto problems = plan_violations(graph, plan, cm.max_cores());
  if (graph.size() != cm.size()) {
    problems.push_back("profile and graph disagree on node count");
  }
  if (problems.empty()) return;
  std::ostringstream msg;
  msg << "plan does not fit graph/profile:";
  for (const auto& p : problems) msg << ' ' << p << ';';
  throw Error(errc::kPlanMismatch, msg.str());
}

std::size_t count_crossings(const Graph& graph, const Plan& plan) {
  std::size_t crossings = 0;
  for (const auto& e : graph.edges()) {
    if (plan.device_class(e.src) != plan.device_class(e.dst)) ++crossings;
  }
  return crossings;
}

nlohmann::json to_json(const Plan& plan) {
  std::vector<int> selection;
  for (auto c : plan.selection()) selection.push_back(static_cast<int>(c));
  return {{"order", plan.order},
          {"selection", selection},
          {"cores", plan.cores},
          {"k_star", plan.k_star},
          {"alpha", plan.alpha}};
}

Plan plan_from_json(const nlohmann::json& doc) {
  try {
    for (const char* key : {"order", "selection", "cores", "k_star", "alpha"}) {
      if (!doc.contains(key)) {
        throw Error(errc::kFormat, std::string("plan json missing \"") + key + "\"");
      }
    }
    Plan plan;
    plan.order = doc.at("order").get<Order>();
    plan.cores = doc.at("cores").get<std::vector<ProcessorId>>();
    plan.k_star = doc.at("k_star").get<int>();
    plan.alpha = doc.at("alpha").get<double>();
    const auto selection = doc.at("selection").get<std::vector<int>>();
    if (selection.size() != plan.cores.size()) {
      throw Error(errc::kFormat, "plan json: selection and cores differ in length");
    }
    for (std::size_t v = 0; v < selection.size(); ++v) {
      if (selection[v] != 0 && selection[v] != 1) {
        throw Error(errc::kFormat, "plan json: selection values must be 0 or 1");
      }
      if ((selection[v] == 0) != (plan.cores[v] == kGpu)) {
        throw Error(errc::kFormat, "plan json: selection and cores disagree at node " +
                                       std::to_string(v));
      }
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::kFormat, std::string("plan json: ") + e.what());
  }
}

void save_plan(const Plan& plan, const std::filesystem::path& path) {
  write_text_file_atomic(path, to_json(plan).dump(1) + "\n");
}

Plan load_plan(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(errc::kFormat, path.string() + ": " + e.what());
  }
  return plan_from_json(doc);
}

}  // namespace hetpart
