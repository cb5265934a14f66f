#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hillgate/boundary_sampler.hpp"
#include "hillgate/chains.hpp"
#include "hillgate/integrator.hpp"

namespace hillgate {

// One excursion started from pi_{A-} (tau_0^- = 0 by convention): the time of
// the next entrance tau_1^-, whether it lands in B, and the accumulated
// observable over [0, tau_1^-].
struct ExcursionSample {
  double tau1 = 0.0;
  bool hit_B = false;
  double g_integral = 0.0;
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  long long n_samples = 0;
  std::string method;
  std::uint64_t seed = 0;
};

enum class HillMode { mean_time, observable };

// Draws x0 ~ pi restricted to the given surface/side, runs Gamma^+ then
// Gamma^-, one sample per independent RNG substream (deterministic for a
// given base stream regardless of n_threads). Timeouts abort the whole
// collection with a censoring report.
std::vector<ExcursionSample> collect_excursions(
    const MetastablePair& pair, const ForceField& field, const SimParams& params,
    const BoundaryMeasureSpec& pi_A_minus, const SurfaceSamplerParams& sampler_params,
    RngStream rng, std::size_t n, int n_threads = 1, Observable observable = nullptr,
    EventCounters* counters_out = nullptr);

// Ratio estimator E[numerator] / P(hit B), stderr by the delta method.
Estimate hill_statistic(const std::vector<ExcursionSample>& excursions,
                        HillMode mode = HillMode::mean_time);

struct HillComponents {
  Estimate tau_stay;   // E[tau_1 | Y_1 in A]
  Estimate p_reach;    // P(Y_1 in B)
  Estimate tau_reach;  // E[tau_1 | Y_1 in B]
};

// E[tau|stay] (1/p - 1) + E[tau|reach]; stderr by first-order propagation
// assuming independent components.
Estimate decomposed_hill(const HillComponents& parts);
Estimate decomposed_hill(const std::vector<ExcursionSample>& excursions,
                         HillMode mode = HillMode::mean_time);
HillComponents hill_components(const std::vector<ExcursionSample>& excursions,
                               HillMode mode = HillMode::mean_time);

// Ergodic estimate: mean of the transition durations (or accumulated
// observables) of an entry chain; stderr by batch means over excursions.
Estimate direct_transition_time(const BoundaryChain& entry_chain);
Estimate direct_transition_statistic(const BoundaryChain& entry_chain);

// Empirical switch frequencies of consecutive entry labels, (A then B) and
// (B then A); both estimate the capacity Pr_pi(Y0 in A, Y1 in B).
struct CapacityEstimates {
  Estimate ab;
  Estimate ba;
};
CapacityEstimates capacity_estimate(const std::vector<SetLabel>& labels);

// Excursion legs started from pi_{A+} (the identity
// Pr_{pi_{A-}}(Y_1 in B) = Pr_{pi_{A+}}(Y at tau_0^- in B) allows rare-event
// runs to skip the in-A leg), plus separately sampled pi_{A-} -> Gamma^+
// durations for the tau_0^+ time correction.
struct PlusSideSamples {
  std::vector<char> hit_B;
  std::vector<double> tau_leg;     // pi_{A+} to the first Gamma^-
  std::vector<double> g_leg;
  std::vector<double> tau_plus0;   // pi_{A-} to the first Gamma^+
  std::vector<double> g_plus0;
};
PlusSideSamples plus_side_initialization(
    const MetastablePair& pair, const ForceField& field, const SimParams& params,
    const BoundaryMeasureSpec& pi_A_plus, const BoundaryMeasureSpec& pi_A_minus,
    const SurfaceSamplerParams& sampler_params, RngStream rng, std::size_t n,
    int n_threads = 1, Observable observable = nullptr);

Estimate plus_side_hit_probability(const PlusSideSamples& samples);
// E[tau_0^+] + E[Gamma^+ -> Gamma^- duration]
Estimate plus_side_mean_time(const PlusSideSamples& samples);

using ReactionCoordinate = std::function<double(const Vec&)>;

struct AmsParams {
  int n_replicas = 128;
  int kill_count = 1;
  ReactionCoordinate reaction_coordinate;
  double level_B = 0.0;  // {xi >= level_B} must lie inside the B detection region
  long long max_iterations = 1000000;

  void validate() const {
    if (n_replicas < 2) throw_invalid("AmsParams: n_replicas must be >= 2");
    if (kill_count < 1 || kill_count >= n_replicas)
      throw_invalid("AmsParams: kill_count must be in [1, n_replicas)");
    if (!reaction_coordinate) throw_invalid("AmsParams: missing reaction coordinate");
  }
};

struct AmsResult {
  Estimate p_hat;
  std::vector<double> reactive_durations;  // excursion times of the final B-reaching paths
  std::vector<double> reactive_g;
  long long iterations = 0;
  std::uint64_t branchings = 0;
};

// Last-particle adaptive multilevel splitting for
// Pr_{pi_{A+}}(excursion reaches B before re-entering A): replicas run from
// pi_{A+} to the first Gamma^-; each round the kill_count lowest max-xi
// replicas (all replicas at or below that level, under ties) are rebranched
// from uniformly chosen survivors at their first state strictly above the
// killed level, and the estimator picks up a factor (1 - killed/n).
AmsResult ams_probability(const MetastablePair& pair, const ForceField& field,
                          const SimParams& params, const BoundaryMeasureSpec& pi_A_plus,
                          const SurfaceSamplerParams& sampler_params, const AmsParams& ams,
                          RngStream rng, Observable observable = nullptr);

}  // namespace hillgate
