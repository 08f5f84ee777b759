#include <doctest.h>

#include <fstream>

#include "hetpart/error.hpp"
#include "support.hpp"

using namespace hetpart;

namespace {

std::string error_code(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

// Two nodes, k = 5, W row i = {gpu, cpu(1..5)}.
CostModel chain_model() {
  std::vector<std::vector<double>> times{{5, 1, 2, 3, 4, 5}, {6, 10, 11, 12, 13, 14}};
  return CostModel(5, 2.0, times, {{0, 1, 4.0}}, {{1, 2, 3, 4}, {1, 1, 1, 1}});
}

}  // namespace

TEST_CASE("exec_time reads the GPU column or the k' column") {
  const CostModel cm = chain_model();
  CHECK(exec_time(cm, 1, kGpu, 0) == 6);
  CHECK(exec_time(cm, 1, 3, 5) == 14);
  CHECK(exec_time(cm, 1, 1, 5) == 14);
  CHECK(exec_time(cm, 0, 1, 1) == 1);
}

TEST_CASE("exec_time rejects a core above k' and k' above k") {
  const CostModel cm = chain_model();
  CHECK(error_code([&] { exec_time(cm, 0, 2, 1); }) == "argument");
  CHECK(error_code([&] { exec_time(cm, 0, 1, 6); }) == "argument");
}

TEST_CASE("comm_time crossing, same side, CPU-to-CPU, non-edge") {
  const Graph g(2, {{0, 1}});
  const CostModel cm = chain_model();
  CHECK(comm_time(g, cm, 0, 1, true) == 2.0);
  CHECK(comm_time(g, cm, 0, 1, false) == 0.0);
  CHECK(crosses(kGpu, 3));
  CHECK(crosses(2, kGpu));
  CHECK_FALSE(crosses(1, 3));
  CHECK_FALSE(crosses(kGpu, kGpu));
  CHECK(error_code([&] { comm_time(g, cm, 1, 0, true); }) == "argument");
}

TEST_CASE("constructor validation") {
  CHECK(error_code([] { CostModel(0, 1, {{1}}, {}, {{}}); }) == "validation");
  CHECK(error_code([] { CostModel(1, 0, {{1, 1}}, {}, {{}}); }) == "validation");
  CHECK(error_code([] { CostModel(2, 1, {{1, 1}}, {}, {{}}); }) == "validation");
  CHECK(error_code([] { CostModel(1, 1, {{1, -1}}, {}, {{}}); }) == "validation");
  CHECK(error_code([] { CostModel(1, 1, {{1, 1}}, {}, {{0, -1, 0, 0}}); }) == "validation");
}

TEST_CASE("bind rejects node count mismatch and transfers on non-edges") {
  const CostModel cm = chain_model();
  CHECK_NOTHROW(bind(cm, Graph(2, {{0, 1}})));
  CHECK(error_code([&] { bind(cm, Graph(3, {{0, 1}})); }) == "validation");
  CHECK(error_code([&] { bind(cm, Graph(2, {})); }) == "validation");
}

TEST_CASE("synth_profile: zero slope gives flat CPU rows") {
  ProfileParams params;
  params.contention_slope = 0.0;
  params.max_cores = 6;
  const Graph g = gen_lstm_grid(3, 4);
  const CostModel cm = synth_profile(g, params, 9);
  for (NodeId v = 0; v < g.size(); ++v) {
    for (int j = 2; j <= 6; ++j) CHECK(cm.cpu_time(v, j) == cm.cpu_time(v, 1));
  }
}

TEST_CASE("synth_profile: linear contention curve") {
  ProfileParams params;
  params.contention_slope = 0.1;
  params.max_cores = 5;
  const Graph g = gen_demo7();
  const CostModel cm = synth_profile(g, params, 4);
  for (NodeId v = 0; v < g.size(); ++v) {
    CHECK(cm.cpu_time(v, 5) == doctest::Approx(cm.cpu_time(v, 1) * 1.4).epsilon(1e-12));
  }
  // cpu = 10 with slope 0.1 at five cores: 10 * (1 + 0.1 * 4).
  CHECK(10.0 * (1.0 + 0.1 * 4) == doctest::Approx(14.0));
}

TEST_CASE("synth_profile: explicit multiplier table") {
  ProfileParams params;
  params.max_cores = 3;
  params.core_multipliers = std::vector<double>{1.0, 1.5, 3.0};
  const Graph g = gen_demo7();
  const CostModel cm = synth_profile(g, params, 4);
  for (NodeId v = 0; v < g.size(); ++v) {
    CHECK(cm.cpu_time(v, 2) == cm.cpu_time(v, 1) * 1.5);
    CHECK(cm.cpu_time(v, 3) == cm.cpu_time(v, 1) * 3.0);
  }
  params.core_multipliers = std::vector<double>{1.0};
  CHECK(error_code([&] { synth_profile(g, params, 4); }) == "argument");
}

TEST_CASE("synth_profile properties over seeded graphs") {
  hetpart::Rng rng(21);
  for (int i = 0; i < 300; ++i) {
    auto [g, cm] = testsupport::random_instance(rng, 25, 6);
    CHECK_NOTHROW(bind(cm, g));
    // Same seed twice gives the same model.
    ProfileParams params;
    const auto seed = rng();
    CHECK(synth_profile(g, params, seed) == synth_profile(g, params, seed));
    // Positive transfer on exactly the edges.
    CHECK(cm.transfers().size() == g.edges().size());
    for (const Transfer& t : cm.transfers()) {
      CHECK(g.has_edge(t.src, t.dst));
      CHECK(t.mb > 0.0);
    }
    for (NodeId v = 0; v < g.size(); ++v) {
      CHECK(cm.gpu_time(v) > 0.0);
      for (int j = 2; j <= cm.max_cores(); ++j) CHECK(cm.cpu_time(v, j) >= cm.cpu_time(v, j - 1));
      const auto& m = cm.memory(v);
      CHECK(m.input > 0.0);
      CHECK(m.output > 0.0);
      CHECK(m.ephemeral > 0.0);
      CHECK(m.weights > 0.0);
    }
  }
}

TEST_CASE("profile json round trip and errors") {
  hetpart::Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    auto [g, cm] = testsupport::random_instance(rng, 20, 8);
    CHECK(profile_from_json(to_json(cm)) == cm);
  }

  auto doc = to_json(chain_model());
  doc["W"][0] = nlohmann::json::array({5, 1, 2, 3, 4});
  CHECK(error_code([&] { profile_from_json(doc); }) == "validation");

  doc = to_json(chain_model());
  doc.erase("Mem");
  CHECK(error_code([&] { profile_from_json(doc); }) == "format");

  doc = to_json(chain_model());
  doc["W"][1][2] = -1.0;
  CHECK(error_code([&] { profile_from_json(doc); }) == "validation");

  const auto dir = testsupport::scratch_dir("profile");
  save_profile(chain_model(), dir / "p.json");
  CHECK(load_profile(dir / "p.json") == chain_model());
  std::filesystem::remove_all(dir);
}

TEST_CASE("profile params json round trip") {
  ProfileParams p;
  p.gpu_mean = 0.75;
  p.core_multipliers = std::vector<double>{1, 2, 3, 4};
  const ProfileParams q = profile_params_from_json(to_json(p));
  CHECK(q.gpu_mean == p.gpu_mean);
  CHECK(q.mem_means == p.mem_means);
  CHECK(q.core_multipliers == p.core_multipliers);
  CHECK(q.max_cores == p.max_cores);
}
