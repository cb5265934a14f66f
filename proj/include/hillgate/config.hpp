#pragma once

#include <cstdint>
#include <string>

#include "hillgate/boundary_sampler.hpp"
#include "hillgate/estimators.hpp"
#include "hillgate/fields.hpp"
#include "hillgate/geometry.hpp"
#include "hillgate/integrator.hpp"

namespace hillgate {

// Plain-text experiment configuration: [section] headers with key = value
// lines; '#' starts a comment. Parsing is strict: unknown sections or keys
// and missing required keys are errors naming the offender. serialize() and
// parse() round-trip.
struct ExperimentConfig {
  int format_version = 1;

  // [field]
  std::string potential = "double_well_1d";  // | radial_double_well | harmonic
  int dimension = 1;
  double a = 1.0;
  double height = 1.0;
  double stiffness = 1.0;
  Vec center1 = {0.0};
  Vec center2 = {0.0};

  // [thermo]
  double gamma = 1.0;
  double beta = 1.0;

  // [region_a] / [region_b] (shape: ball)
  Vec center_a = {-1.0};
  double radius_a = 0.3;
  Vec center_b = {1.0};
  double radius_b = 0.3;

  // [sim]
  double dt = 1e-3;
  std::string scheme = "baoab";  // | euler_maruyama
  long long max_steps = 200'000'000;
  double crossing_tol = 1e-10;
  double tol_tangent = 1e-10;

  // [sampler]
  std::string sampler_method = "direct_sphere";  // | metropolis_projection
  int n_burnin = 256;
  double proposal_scale = 0.3;
  int n_thin = 16;

  // [run]
  std::uint64_t seed = 7012;
  std::uint64_t n_samples = 5000;   // excursions / boundary samples
  std::uint64_t n_events = 100000;  // crossings for direct chains
  int threads = 1;
  std::string out_dir = "out";
  std::string estimators = "hill,decomposed,direct";

  // [ams]
  int n_replicas = 128;
  int kill_count = 8;
  int repeats = 4;  // independent AMS runs; errors are empirical across runs
  double level_b = 0.7;
  std::string xi = "q0";  // reaction coordinate: first position coordinate

  // [observable]
  std::string observable = "none";  // | speed_indicator
  double obs_threshold = 1.0;

  // ---- factories (validated) ----
  ForceField make_field() const;
  MetastablePair make_pair() const;
  ThermoParams make_thermo() const;
  SimParams make_sim_params() const;
  SurfaceSamplerParams make_sampler_params() const;
  // nullptr when observable = none
  Observable make_observable() const;
  AmsParams make_ams_params() const;
  BoundaryMeasureSpec boundary_spec(SetLabel set, BoundarySide side) const;

  std::string serialize() const;
  std::uint64_t hash() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::string& path);
void write_config(const ExperimentConfig& cfg, const std::string& path);

}  // namespace hillgate
