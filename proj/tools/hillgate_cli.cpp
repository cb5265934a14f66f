// Command-line front end: configuration loading, experiment orchestration,
// and the validation suite.
#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>

#include "hillgate/config.hpp"
#include "hillgate/runner.hpp"
#include "hillgate/validation.hpp"
#include "hillgate/version.hpp"

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  int threads = 0;
  bool quick = false;
};

int resolve_threads(int cli_threads) {
  if (cli_threads > 0) return cli_threads;
  if (const char* env = std::getenv("HILLGATE_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return 1;
}

hillgate::ExperimentConfig load_config(const GlobalArgs& args) {
  if (args.config_path.empty())
    throw hillgate::Error(hillgate::Errc::config, "missing --config <path>");
  auto cfg = hillgate::parse_config(args.config_path);
  if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  cfg.threads = resolve_threads(args.threads > 0 ? args.threads : cfg.threads);
  return cfg;
}

void print_estimates(const nlohmann::json& summary) {
  if (!summary.contains("estimates")) return;
  for (const auto& e : summary["estimates"])
    std::printf("  %-28s %.6g +- %.3g  (n=%lld)\n", e["method"].get<std::string>().c_str(),
                e["value"].get<double>(), e["std_error"].get<double>(),
                e["n"].get<long long>());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hillgate: transition statistics of the Langevin dynamics via the Hill relation"};
  app.set_version_flag("--version", std::string("hillgate ") + hillgate::kVersion);
  app.require_subcommand(1);

  GlobalArgs args;
  app.add_option("--config", args.config_path, "experiment configuration file");
  app.add_option("--seed", args.seed, "override the config seed");
  app.add_option("--threads", args.threads,
                 "worker threads (fallback: HILLGATE_THREADS, then config)");
  app.add_option("--out-dir", args.out_dir, "override the config output directory");
  app.add_flag("--quick", args.quick, "reduced-scale validation profile");

  auto* cmd_sample = app.add_subcommand("sample-boundary",
                                        "draw exact samples from the entry measure pi^-");
  auto* cmd_direct = app.add_subcommand("simulate-direct",
                                        "long trajectory, crossing chain and direct estimates");
  auto* cmd_hill = app.add_subcommand("estimate-hill",
                                      "excursion sampling and Hill-ratio estimates");
  auto* cmd_ams = app.add_subcommand("estimate-ams",
                                     "adaptive multilevel splitting for the rare branch");
  auto* cmd_oracle = app.add_subcommand("oracle",
                                        "exact finite-chain identities on random chains");
  int oracle_random = 100;
  int oracle_max_states = 8;
  cmd_oracle->add_option("--random", oracle_random, "number of random chains");
  cmd_oracle->add_option("--max-states", oracle_max_states, "largest chain size");
  auto* cmd_validate = app.add_subcommand("validate", "run the full consistency suite");
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    nlohmann::json summary;
    if (cmd_sample->parsed()) {
      summary = hillgate::runner::run_sample_boundary(load_config(args));
    } else if (cmd_direct->parsed()) {
      summary = hillgate::runner::run_simulate_direct(load_config(args));
    } else if (cmd_hill->parsed()) {
      summary = hillgate::runner::run_estimate_hill(load_config(args));
    } else if (cmd_ams->parsed()) {
      summary = hillgate::runner::run_estimate_ams(load_config(args));
    } else if (cmd_oracle->parsed()) {
      const std::uint64_t seed = args.seed >= 0 ? static_cast<std::uint64_t>(args.seed) : 7012;
      const std::string out = args.out_dir.empty() ? "out" : args.out_dir;
      summary = hillgate::runner::run_oracle(oracle_random, oracle_max_states, seed, out);
      std::printf("oracle: worst hill %.3g, representation %.3g, trace %.3g (tol 1e-10)\n",
                  summary["worst_hill_deviation"].get<double>(),
                  summary["worst_representation_deviation"].get<double>(),
                  summary["worst_trace_deviation"].get<double>());
      if (!summary["pass"].get<bool>()) {
        std::fprintf(stderr, "oracle: FAILED\n");
        return 1;
      }
    } else if (cmd_validate->parsed()) {
      auto cfg = load_config(args);
      hillgate::ValidationOptions opts;
      opts.quick = args.quick;
      opts.threads = cfg.threads;
      opts.seed = cfg.seed;
      summary = hillgate::runner::run_validate(cfg, opts);
      for (const auto& c : summary["criteria"])
        std::printf("[%s] criterion %2d: %s  (%.1fs)  %s\n",
                    c["pass"].get<bool>() ? "PASS" : "FAIL", c["id"].get<int>(),
                    c["name"].get<std::string>().c_str(), c["seconds"].get<double>(),
                    c["details"].get<std::string>().c_str());
      if (!summary["pass"].get<bool>()) {
        std::fprintf(stderr, "validate: FAILED\n");
        return 1;
      }
    }
    print_estimates(summary);
    if (summary.contains("wall_time_s"))
      std::printf("done in %.2fs\n", summary["wall_time_s"].get<double>());
    return 0;
  } catch (const hillgate::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
