#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "hillgate/config.hpp"
#include "hillgate/validation.hpp"

namespace hillgate::runner {

// Each subcommand writes summary.json (plus its CSV artifacts) into
// cfg.out_dir and returns the summary. Summaries are deterministic for a
// fixed config and seed except for the wall_time_s field.
nlohmann::json run_sample_boundary(const ExperimentConfig& cfg);
nlohmann::json run_simulate_direct(const ExperimentConfig& cfg);
nlohmann::json run_estimate_hill(const ExperimentConfig& cfg);
nlohmann::json run_estimate_ams(const ExperimentConfig& cfg);

nlohmann::json run_oracle(int n_random, int max_states, std::uint64_t seed,
                          const std::string& out_dir);
nlohmann::json run_validate(const ExperimentConfig& cfg, const ValidationOptions& opts);

}  // namespace hillgate::runner
