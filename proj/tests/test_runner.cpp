#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hillgate/runner.hpp"

using namespace hillgate;

namespace {

ExperimentConfig small_config(const std::string& out_dir) {
  ExperimentConfig cfg;
  cfg.potential = "double_well_1d";
  cfg.a = 1.0;
  cfg.height = 1.0;
  cfg.beta = 1.0;
  cfg.gamma = 1.0;
  cfg.n_samples = 64;
  cfg.n_events = 400;
  cfg.threads = 2;
  cfg.seed = 4242;
  cfg.out_dir = out_dir;
  cfg.observable = "speed_indicator";
  return cfg;
}

nlohmann::json strip_wall_time(nlohmann::json j) {
  j.erase("wall_time_s");
  return j;
}

}  // namespace

TEST_SUITE_BEGIN("runner");

TEST_CASE("estimate-hill summary is deterministic modulo wall time") {
  const auto cfg = small_config("/tmp/hillgate_test_hill");
  const auto s1 = runner::run_estimate_hill(cfg);
  auto cfg2 = cfg;
  cfg2.threads = 4;  // thread count must not change results
  const auto s2 = runner::run_estimate_hill(cfg2);
  CHECK(strip_wall_time(s1) == strip_wall_time(s2));
  CHECK(std::filesystem::exists(cfg.out_dir + "/summary.json"));
  CHECK(std::filesystem::exists(cfg.out_dir + "/samples.csv"));
  CHECK(s1["config_hash"] == s2["config_hash"]);
  CHECK(s1["estimates"].size() == 3);  // hill, decomposed, observable mode
}

TEST_CASE("simulate-direct writes the chain and direct estimates") {
  auto cfg = small_config("/tmp/hillgate_test_direct");
  cfg.n_events = 600;
  const auto s1 = runner::run_simulate_direct(cfg);
  const auto s2 = runner::run_simulate_direct(cfg);
  CHECK(strip_wall_time(s1) == strip_wall_time(s2));
  CHECK(std::filesystem::exists(cfg.out_dir + "/chain.csv"));
  std::ifstream csv(cfg.out_dir + "/chain.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "index,time,side,set,q0,p0,g_segment");
  std::size_t lines = 0;
  for (std::string line; std::getline(csv, line);) ++lines;
  CHECK(lines == cfg.n_events);
}

TEST_CASE("sample-boundary produces the sample dump and Z constants") {
  auto cfg = small_config("/tmp/hillgate_test_samples");
  cfg.n_samples = 100;
  const auto s = runner::run_sample_boundary(cfg);
  CHECK(s["z_plus"].get<double>() == doctest::Approx(s["z_minus"].get<double>()));
  std::ifstream csv(cfg.out_dir + "/samples.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "index,q0,p0,pn,set");
}

TEST_CASE("estimate-ams is deterministic across thread counts") {
  auto cfg = small_config("/tmp/hillgate_test_ams");
  cfg.n_replicas = 24;
  cfg.kill_count = 3;
  cfg.repeats = 3;
  cfg.n_samples = 64;
  const auto s1 = runner::run_estimate_ams(cfg);
  auto cfg2 = cfg;
  cfg2.threads = 1;
  const auto s2 = runner::run_estimate_ams(cfg2);
  CHECK(strip_wall_time(s1) == strip_wall_time(s2));
  CHECK(s1["ams_repeats"] == 3);
}

TEST_CASE("oracle runner reports pass") {
  const auto s = runner::run_oracle(20, 6, 99, "/tmp/hillgate_test_oracle");
  CHECK(s["pass"].get<bool>());
  CHECK(s["worst_hill_deviation"].get<double>() <= 1e-10);
}

TEST_SUITE_END();
