#include "hillgate/integrator.hpp"

#include <cmath>
#include <sstream>

namespace hillgate {

namespace {

std::string state_string(const PhasePoint& x, double t) {
  std::ostringstream os;
  os << "t=" << t << " q=(";
  for (std::size_t i = 0; i < x.q.size(); ++i) os << (i ? "," : "") << x.q[i];
  os << ") p=(";
  for (std::size_t i = 0; i < x.p.size(); ++i) os << (i ? "," : "") << x.p[i];
  os << ")";
  return os.str();
}

}  // namespace

void Stepper::step(PhasePoint& x, RngStream& rng) {
  const double dt = params_->dt;
  const std::size_t d = x.q.size();
  if (params_->scheme == Scheme::baoab) {
    if (!force_valid_) {
      field_->force_into(x.q, force_);
      force_valid_ = true;
    }
    for (std::size_t i = 0; i < d; ++i) x.p[i] += 0.5 * dt * force_[i];
    for (std::size_t i = 0; i < d; ++i) x.q[i] += 0.5 * dt * x.p[i];
    for (std::size_t i = 0; i < d; ++i)
      x.p[i] = ou_decay_ * x.p[i] + ou_noise_ * rng.normal();
    for (std::size_t i = 0; i < d; ++i) x.q[i] += 0.5 * dt * x.p[i];
    field_->force_into(x.q, force_);
    for (std::size_t i = 0; i < d; ++i) x.p[i] += 0.5 * dt * force_[i];
  } else {
    field_->force_into(x.q, force_);
    force_valid_ = false;
    const double gamma = params_->thermo.gamma;
    for (std::size_t i = 0; i < d; ++i) {
      const double pi = x.p[i];
      x.q[i] += dt * pi;
      x.p[i] = pi + dt * (force_[i] - gamma * pi) + em_noise_ * rng.normal();
    }
  }
}

PhasePoint step(const PhasePoint& x, const ForceField& field, const SimParams& params,
                RngStream& rng) {
  params.validate();
  PhasePoint y = x;
  Stepper st(field, params);
  st.step(y, rng);
  if (!all_finite(y.q) || !all_finite(y.p))
    throw_numerical("integration step produced a non-finite state: " + state_string(y, 0.0));
  return y;
}

std::optional<CrossingEvent> detect_crossing(const PhasePoint& x_before,
                                             const PhasePoint& x_after, double t_before,
                                             const LevelSetRegion& region,
                                             const SimParams& params, EventCounters* counters,
                                             int seed_sign) {
  const double phi_b = region.phi(x_before.q);
  const double phi_a = region.phi(x_after.q);
  const bool in_after = phi_a < 0.0;

  bool in_before;
  double s_lo = 0.0;
  if (seed_sign != 0) {
    in_before = seed_sign < 0;
    if (std::abs(phi_b) <= params.crossing_tol) {
      // The step starts on the surface; advance the lower bracket to the first
      // chord point that has left the localization band on the seeded side. If
      // the chord never does, the grazing is dropped as a tangential accident.
      const int n_scan = 16;
      bool found = false;
      for (int k = 1; k <= n_scan; ++k) {
        const double s = static_cast<double>(k) / n_scan;
        Vec q(x_before.q.size());
        for (std::size_t i = 0; i < q.size(); ++i)
          q[i] = (1.0 - s) * x_before.q[i] + s * x_after.q[i];
        const double ph = region.phi(q);
        if ((in_before ? ph < -params.crossing_tol : ph > params.crossing_tol)) {
          s_lo = s;
          found = true;
          break;
        }
        if ((ph < 0.0) != in_before) break;  // already on the other side
      }
      if (!found && ((phi_a < 0.0) == in_before)) return std::nullopt;
      if (!found) {
        if (counters) ++counters->gamma_zero_discards;
        return std::nullopt;
      }
    }
  } else {
    in_before = phi_b < 0.0;
  }
  if (in_before == in_after) return std::nullopt;

  auto chord_point = [&](double s) {
    Vec q(x_before.q.size());
    for (std::size_t i = 0; i < q.size(); ++i)
      q[i] = (1.0 - s) * x_before.q[i] + s * x_after.q[i];
    return q;
  };

  // Coarse scan for the earliest sign change, then bisection within it.
  const int n_scan = 16;
  double lo = s_lo, hi = 1.0;
  for (int k = 1; k <= n_scan; ++k) {
    const double s = s_lo + (1.0 - s_lo) * static_cast<double>(k) / n_scan;
    const bool in_s = region.phi(chord_point(s)) < 0.0;
    if (in_s != in_before) {
      hi = s;
      break;
    }
    lo = s;
  }

  double s_mid = hi;
  Vec q_mid = chord_point(s_mid);
  double phi_mid = region.phi(q_mid);
  int it = 0;
  while (std::abs(phi_mid) > params.crossing_tol) {
    if (++it > 200)
      throw_geometry("detect_crossing: bisection did not converge in 200 iterations");
    s_mid = 0.5 * (lo + hi);
    q_mid = chord_point(s_mid);
    phi_mid = region.phi(q_mid);
    ((phi_mid < 0.0) == in_before ? lo : hi) = s_mid;
  }

  CrossingEvent ev;
  ev.x.q = std::move(q_mid);
  ev.x.p.resize(x_before.p.size());
  for (std::size_t i = 0; i < ev.x.p.size(); ++i)
    ev.x.p[i] = (1.0 - s_mid) * x_before.p[i] + s_mid * x_after.p[i];
  ev.time = t_before + s_mid * params.dt;
  ev.set_label = region.label();
  ev.side = region.classify_boundary(ev.x.q, ev.x.p, params.geometry_tolerances());

  if (ev.side == BoundarySide::gamma_zero) {
    if (counters) ++counters->gamma_zero_discards;
    return std::nullopt;
  }
  const BoundarySide expected =
      in_before ? BoundarySide::gamma_plus : BoundarySide::gamma_minus;
  if (ev.side != expected) {
    if (counters) ++counters->side_mismatch_discards;
    return std::nullopt;
  }
  return ev;
}

TrajectorySimulator::TrajectorySimulator(const ForceField& field, const MetastablePair& pair,
                                         const SimParams& params, RngStream rng)
    : field_(&field), pair_(&pair), params_(params), rng_(rng), stepper_(field, params_) {
  params_.validate();
  if (field.dimension() != pair.dimension())
    throw_usage("TrajectorySimulator: field/pair dimension mismatch");
}

void TrajectorySimulator::reset(const PhasePoint& x0, double t0) {
  if (static_cast<int>(x0.q.size()) != field_->dimension() || x0.q.size() != x0.p.size())
    throw_usage("TrajectorySimulator: state dimension mismatch");
  if (!all_finite(x0.q) || !all_finite(x0.p))
    throw_usage("TrajectorySimulator: non-finite initial state");
  x_ = x0;
  t_ = t0;
  steps_ = 0;
  segment_accum_ = 0.0;
  last_closed_segment_g_ = 0.0;
  stepper_ = Stepper(*field_, params_);
  // A start on one of the surfaces is oriented by the velocity: entering
  // configurations count as inside on the first step, exiting as outside.
  for (int r = 0; r < 2; ++r) {
    const LevelSetRegion& region = pair_->region(r == 0 ? SetLabel::A : SetLabel::B);
    seed_sign_[r] = 0;
    if (std::abs(region.phi(x_.q)) <= params_.crossing_tol) {
      const BoundarySide side =
          region.classify_boundary(x_.q, x_.p, params_.geometry_tolerances());
      seed_sign_[r] = side == BoundarySide::gamma_minus ? -1 : +1;
    }
  }
}

std::optional<CrossingEvent> TrajectorySimulator::step_once() {
  x_prev_ = x_;
  stepper_.step(x_, rng_);
  if (!all_finite(x_.q) || !all_finite(x_.p))
    throw_numerical("numerical blowup at " + state_string(x_, t_));

  std::optional<CrossingEvent> best;
  for (int r = 0; r < 2; ++r) {
    const LevelSetRegion& region = pair_->region(r == 0 ? SetLabel::A : SetLabel::B);
    auto ev = detect_crossing(x_prev_, x_, t_, region, params_, &counters_, seed_sign_[r]);
    seed_sign_[r] = 0;
    if (ev && (!best || ev->time < best->time)) best = std::move(ev);
  }

  if (observable_) {
    const double gval = observable_(x_prev_.q, x_prev_.p);
    if (best) {
      const double s = (best->time - t_) / params_.dt;
      last_closed_segment_g_ = segment_accum_ + s * params_.dt * gval;
      segment_accum_ = (1.0 - s) * params_.dt * gval;
    } else {
      segment_accum_ += params_.dt * gval;
    }
  }

  t_ += params_.dt;
  ++steps_;
  return best;
}

TrajectorySimulator::RunResult TrajectorySimulator::run_until_side(BoundarySide target) {
  const double t_start = t_;
  const long long steps_start = steps_;
  double g_total = 0.0;
  while (true) {
    if (steps_ - steps_start >= params_.max_steps)
      throw TimeoutError("max_steps exceeded before reaching the target crossing",
                         t_ - t_start, steps_ - steps_start);
    auto ev = step_once();
    if (ev) {
      g_total += last_closed_segment_g_;
      if (ev->side == target) {
        RunResult r;
        r.event = *ev;
        r.elapsed = ev->time - t_start;
        r.steps = steps_ - steps_start;
        r.g_integral = g_total;
        return r;
      }
    }
  }
}

void TrajectorySimulator::collect(BoundaryChain& chain, std::size_t n_events) {
  const bool track_g = static_cast<bool>(observable_);
  std::size_t got = 0;
  long long steps_start = steps_;
  while (got < n_events) {
    if (steps_ - steps_start >= params_.max_steps)
      throw TimeoutError("max_steps exceeded while collecting crossings", t_, steps_);
    auto ev = step_once();
    if (!ev) continue;
    if (track_g) chain.accumulators.push_back(last_closed_segment_g_);
    chain.events.push_back(std::move(*ev));
    ++got;
  }
  chain.counters = counters_;
}

EntryExitResult run_until_entry(const PhasePoint& x0, const ForceField& field,
                                const MetastablePair& pair, const SimParams& params,
                                RngStream& rng) {
  TrajectorySimulator sim(field, pair, params, rng);
  sim.reset(x0);
  auto r = sim.run_until_side(BoundarySide::gamma_minus);
  rng = sim.rng();
  return {r.event, r.elapsed, r.steps};
}

EntryExitResult run_until_exit(const PhasePoint& x0, const ForceField& field,
                               const MetastablePair& pair, const SimParams& params,
                               RngStream& rng) {
  TrajectorySimulator sim(field, pair, params, rng);
  sim.reset(x0);
  auto r = sim.run_until_side(BoundarySide::gamma_plus);
  rng = sim.rng();
  return {r.event, r.elapsed, r.steps};
}

BoundaryChain run_collect_chain(const PhasePoint& x0, const ForceField& field,
                                const MetastablePair& pair, const SimParams& params,
                                RngStream& rng, std::size_t n_events, Observable observable) {
  TrajectorySimulator sim(field, pair, params, rng);
  sim.reset(x0);
  if (observable) sim.set_observable(std::move(observable));
  BoundaryChain chain;
  sim.collect(chain, n_events);
  rng = sim.rng();
  return chain;
}

void simulate_steps(PhasePoint& x, const ForceField& field, const SimParams& params,
                    RngStream& rng, long long n_steps,
                    const std::function<void(const Vec&, const Vec&)>& visit) {
  params.validate();
  Stepper st(field, params);
  for (long long k = 0; k < n_steps; ++k) {
    st.step(x, rng);
    if (!all_finite(x.q) || !all_finite(x.p))
      throw_numerical("numerical blowup in simulate_steps at step " + std::to_string(k) +
                      ", " + state_string(x, k * params.dt));
    if (visit) visit(x.q, x.p);
  }
}

}  // namespace hillgate
