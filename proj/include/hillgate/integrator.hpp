#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "hillgate/fields.hpp"
#include "hillgate/geometry.hpp"
#include "hillgate/rng.hpp"
#include "hillgate/vec.hpp"

namespace hillgate {

struct PhasePoint {
  Vec q;
  Vec p;

  PhasePoint() = default;
  PhasePoint(Vec q_, Vec p_) : q(std::move(q_)), p(std::move(p_)) {}

  PhasePoint momentum_reversed() const {
    PhasePoint r = *this;
    for (double& v : r.p) v = -v;
    return r;
  }
};

enum class Scheme { baoab, euler_maruyama };

struct SimParams {
  ThermoParams thermo;
  double dt = 1e-3;
  Scheme scheme = Scheme::baoab;
  long long max_steps = 200'000'000;
  double crossing_tol = 1e-10;  // |phi| band for event localization
  double tol_tangent = 1e-10;   // |p.n| band for gamma_zero discards
  double noise_scale = 1.0;     // 0 turns the noise off (deterministic test mode)

  void validate() const {
    thermo.validate();
    if (!(dt > 0.0)) throw_invalid("SimParams: dt must be > 0");
    if (!(crossing_tol > 0.0)) throw_invalid("SimParams: crossing_tol must be > 0");
    if (max_steps < 1) throw_invalid("SimParams: max_steps must be >= 1");
  }
  GeometryTolerances geometry_tolerances() const { return {crossing_tol, tol_tangent}; }
};

// A localized boundary crossing of one region's surface.
struct CrossingEvent {
  PhasePoint x;
  double time = 0.0;
  BoundarySide side = BoundarySide::gamma_minus;
  SetLabel set_label = SetLabel::A;
};

struct EventCounters {
  std::uint64_t gamma_zero_discards = 0;
  std::uint64_t side_mismatch_discards = 0;
};

// One step of the chosen scheme, in place. BAOAB reuses the force evaluated
// at the end of the previous step when `force_cache` is passed and valid.
class Stepper {
 public:
  Stepper(const ForceField& field, const SimParams& params)
      : field_(&field), params_(&params) {
    const double gdt = params.thermo.gamma * params.dt;
    ou_decay_ = std::exp(-gdt);
    ou_noise_ = params.noise_scale * std::sqrt((1.0 - ou_decay_ * ou_decay_) / params.thermo.beta);
    em_noise_ = params.noise_scale *
                std::sqrt(2.0 * params.thermo.gamma * params.dt / params.thermo.beta);
  }

  void step(PhasePoint& x, RngStream& rng);

 private:
  const ForceField* field_;
  const SimParams* params_;
  double ou_decay_, ou_noise_, em_noise_;
  Vec force_;
  bool force_valid_ = false;
};

PhasePoint step(const PhasePoint& x, const ForceField& field, const SimParams& params,
                RngStream& rng);

// Localizes a sign change of phi along the straight chord between two
// consecutive states by scan + bisection; the velocity and the time are
// interpolated linearly. Returns nullopt when there is no crossing or when the
// located configuration is tangential (gamma_zero), which is discarded and
// counted. `seed_sign` overrides sign(phi(q_before)) for steps that start on
// the surface (+1 outside, -1 inside, 0 = use phi).
std::optional<CrossingEvent> detect_crossing(const PhasePoint& x_before,
                                             const PhasePoint& x_after, double t_before,
                                             const LevelSetRegion& region,
                                             const SimParams& params,
                                             EventCounters* counters = nullptr,
                                             int seed_sign = 0);

using Observable = std::function<double(const Vec& q, const Vec& p)>;

// The interleaved chain of Sigma crossings with timestamps and per-segment
// integrals of an observable (rectangle rule at step resolution).
struct BoundaryChain {
  std::vector<CrossingEvent> events;
  // g_segment[i] = integral of G over (time of event i-1, time of event i],
  // counted from the trajectory start for i = 0. Empty when no observable
  // was accumulated.
  std::vector<double> accumulators;
  EventCounters counters;

  std::size_t size() const { return events.size(); }
  bool has_accumulators() const { return !accumulators.empty(); }
};

// Owns the trajectory state so that runs can be chained (the next call
// continues from where the previous one stopped).
class TrajectorySimulator {
 public:
  TrajectorySimulator(const ForceField& field, const MetastablePair& pair,
                      const SimParams& params, RngStream rng);

  void reset(const PhasePoint& x0, double t0 = 0.0);

  const PhasePoint& state() const { return x_; }
  double time() const { return t_; }
  long long steps_taken() const { return steps_; }
  const EventCounters& counters() const { return counters_; }
  RngStream& rng() { return rng_; }

  // Advances one step; returns the crossing emitted during that step, if any.
  std::optional<CrossingEvent> step_once();

  struct RunResult {
    CrossingEvent event;
    double elapsed = 0.0;
    long long steps = 0;
    double g_integral = 0.0;  // meaningful when an observable is set
  };

  void set_observable(Observable g) { observable_ = std::move(g); }

  // First crossing with the requested side (gamma_minus for entries into
  // A or B, gamma_plus for exits). Throws TimeoutError past max_steps.
  RunResult run_until_side(BoundarySide target);

  // Appends n_events crossings (both sides) to a chain.
  void collect(BoundaryChain& chain, std::size_t n_events);

 private:
  std::optional<CrossingEvent> detect_for_region(const LevelSetRegion& region, int region_idx);

  const ForceField* field_;
  const MetastablePair* pair_;
  SimParams params_;
  RngStream rng_;
  Stepper stepper_;

  PhasePoint x_, x_prev_;
  double t_ = 0.0;
  long long steps_ = 0;
  EventCounters counters_;
  int seed_sign_[2] = {0, 0};  // per-region override for on-surface starts

  Observable observable_;
  double segment_accum_ = 0.0;
  double last_closed_segment_g_ = 0.0;
};

// Convenience wrappers matching the operation-level interface.
struct EntryExitResult {
  CrossingEvent event;
  double elapsed;
  long long steps;
};

EntryExitResult run_until_entry(const PhasePoint& x0, const ForceField& field,
                                const MetastablePair& pair, const SimParams& params,
                                RngStream& rng);
EntryExitResult run_until_exit(const PhasePoint& x0, const ForceField& field,
                               const MetastablePair& pair, const SimParams& params,
                               RngStream& rng);
BoundaryChain run_collect_chain(const PhasePoint& x0, const ForceField& field,
                                const MetastablePair& pair, const SimParams& params,
                                RngStream& rng, std::size_t n_events,
                                Observable observable = nullptr);

// Plain equilibrium sampling without any boundary bookkeeping; calls
// `visit(q, p)` after every step.
void simulate_steps(PhasePoint& x, const ForceField& field, const SimParams& params,
                    RngStream& rng, long long n_steps,
                    const std::function<void(const Vec&, const Vec&)>& visit = nullptr);

}  // namespace hillgate
