#include "hillgate/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hillgate/parallel.hpp"
#include "hillgate/stats.hpp"

namespace hillgate {

namespace {

struct RatioAccumulator {
  double sum_n = 0.0, sum_d = 0.0;
  double ss_nn = 0.0, ss_dd = 0.0, ss_nd = 0.0;
  std::size_t n = 0;
};

Estimate ratio_estimate(const std::vector<double>& num, const std::vector<double>& den) {
  const std::size_t n = num.size();
  double nbar = 0.0, dbar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    nbar += num[i];
    dbar += den[i];
  }
  nbar /= static_cast<double>(n);
  dbar /= static_cast<double>(n);
  double snn = 0.0, sdd = 0.0, snd = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    snn += (num[i] - nbar) * (num[i] - nbar);
    sdd += (den[i] - dbar) * (den[i] - dbar);
    snd += (num[i] - nbar) * (den[i] - dbar);
  }
  if (n > 1) {
    snn /= static_cast<double>(n - 1);
    sdd /= static_cast<double>(n - 1);
    snd /= static_cast<double>(n - 1);
  }
  Estimate e;
  e.value = nbar / dbar;
  const double var =
      (snn - 2.0 * e.value * snd + e.value * e.value * sdd) / (static_cast<double>(n) * dbar * dbar);
  e.std_error = std::sqrt(std::max(0.0, var));
  e.n_samples = static_cast<long long>(n);
  return e;
}

double numerator_of(const ExcursionSample& s, HillMode mode) {
  return mode == HillMode::mean_time ? s.tau1 : s.g_integral;
}

}  // namespace

std::vector<ExcursionSample> collect_excursions(
    const MetastablePair& pair, const ForceField& field, const SimParams& params,
    const BoundaryMeasureSpec& pi_A_minus, const SurfaceSamplerParams& sampler_params,
    RngStream rng, std::size_t n, int n_threads, Observable observable,
    EventCounters* counters_out) {
  if (n == 0) throw_invalid("collect_excursions: n must be >= 1");
  if (pi_A_minus.side != BoundarySide::gamma_minus)
    throw_invalid("collect_excursions: pi_A_minus must be a gamma_minus measure");
  pi_A_minus.validate();

  std::vector<ExcursionSample> out(n);
  std::vector<char> censored(n, 0);
  std::vector<EventCounters> counters(n);
  parallel_for(n, n_threads, [&](std::size_t i) {
    RngStream stream = rng.substream(i);
    BoundarySampler sampler(pi_A_minus, sampler_params);
    const PhasePoint x0 = sampler.sample(stream);
    TrajectorySimulator sim(field, pair, params, stream);
    sim.reset(x0);
    if (observable) sim.set_observable(observable);
    try {
      const auto leg1 = sim.run_until_side(BoundarySide::gamma_plus);
      const auto leg2 = sim.run_until_side(BoundarySide::gamma_minus);
      out[i].tau1 = leg2.event.time;
      out[i].hit_B = leg2.event.set_label == SetLabel::B;
      out[i].g_integral = leg1.g_integral + leg2.g_integral;
    } catch (const TimeoutError&) {
      censored[i] = 1;
    }
    counters[i] = sim.counters();
  });
  if (counters_out) {
    for (const auto& c : counters) {
      counters_out->gamma_zero_discards += c.gamma_zero_discards;
      counters_out->side_mismatch_discards += c.side_mismatch_discards;
    }
  }
  const std::size_t n_censored =
      static_cast<std::size_t>(std::count(censored.begin(), censored.end(), 1));
  if (n_censored > 0)
    throw TimeoutError("collect_excursions: " + std::to_string(n_censored) + " of " +
                           std::to_string(n) + " excursions were censored by max_steps; "
                           "estimates from this batch would be biased",
                       0.0, 0);
  return out;
}

Estimate hill_statistic(const std::vector<ExcursionSample>& excursions, HillMode mode) {
  if (excursions.empty()) throw Error(Errc::insufficient_data, "hill_statistic: no excursions");
  std::size_t hits = 0;
  for (const auto& s : excursions) hits += s.hit_B ? 1 : 0;
  if (hits == 0)
    throw Error(Errc::insufficient_data,
                "hill_statistic: no excursion reached B (infinite estimate); use "
                "ams_probability for the rare-event regime");
  std::vector<double> num(excursions.size()), den(excursions.size());
  for (std::size_t i = 0; i < excursions.size(); ++i) {
    num[i] = numerator_of(excursions[i], mode);
    den[i] = excursions[i].hit_B ? 1.0 : 0.0;
  }
  Estimate e = ratio_estimate(num, den);
  e.method = mode == HillMode::mean_time ? "hill_mean_time" : "hill_observable";
  return e;
}

HillComponents hill_components(const std::vector<ExcursionSample>& excursions, HillMode mode) {
  std::vector<double> stay, reach;
  for (const auto& s : excursions)
    (s.hit_B ? reach : stay).push_back(numerator_of(s, mode));
  const double n = static_cast<double>(excursions.size());
  const double p = static_cast<double>(reach.size()) / n;
  HillComponents c;
  const auto ms_stay = mean_stderr(stay);
  const auto ms_reach = mean_stderr(reach);
  c.tau_stay = {ms_stay.mean, ms_stay.std_error, static_cast<long long>(stay.size()),
                "tau_stay", 0};
  c.tau_reach = {ms_reach.mean, ms_reach.std_error, static_cast<long long>(reach.size()),
                 "tau_reach", 0};
  c.p_reach = {p, std::sqrt(std::max(0.0, p * (1.0 - p) / n)),
               static_cast<long long>(excursions.size()), "p_reach", 0};
  return c;
}

Estimate decomposed_hill(const HillComponents& parts) {
  const double p = parts.p_reach.value;
  if (!(p > 0.0)) throw_invalid("decomposed_hill: probability estimate must be > 0");
  Estimate e;
  const double inv_minus_one = 1.0 / p - 1.0;
  e.value = parts.tau_stay.value * inv_minus_one + parts.tau_reach.value;
  const double d_stay = inv_minus_one * parts.tau_stay.std_error;
  const double d_p = parts.tau_stay.value / (p * p) * parts.p_reach.std_error;
  const double d_reach = parts.tau_reach.std_error;
  e.std_error = std::sqrt(d_stay * d_stay + d_p * d_p + d_reach * d_reach);
  e.n_samples = parts.p_reach.n_samples;
  e.method = "decomposed_hill";
  return e;
}

Estimate decomposed_hill(const std::vector<ExcursionSample>& excursions, HillMode mode) {
  return decomposed_hill(hill_components(excursions, mode));
}

namespace {

Estimate batch_mean_estimate(const std::vector<double>& xs, const std::string& method) {
  if (xs.size() < 2)
    throw Error(Errc::insufficient_data, method + ": need at least 2 completed excursions");
  const auto ms = batch_means_stderr(xs);
  Estimate e;
  e.value = ms.mean;
  e.std_error = ms.std_error;
  e.n_samples = static_cast<long long>(ms.n);
  e.method = method;
  return e;
}

}  // namespace

Estimate direct_transition_time(const BoundaryChain& entry_chain) {
  const auto ts = transition_samples(entry_chain);
  std::vector<double> xs;
  xs.reserve(ts.size());
  for (const auto& t : ts) xs.push_back(t.duration);
  return batch_mean_estimate(xs, "direct_transition_time");
}

Estimate direct_transition_statistic(const BoundaryChain& entry_chain) {
  const auto ts = transition_samples(entry_chain);
  std::vector<double> xs;
  xs.reserve(ts.size());
  for (const auto& t : ts) {
    if (!t.has_g)
      throw_invalid("direct_transition_statistic: chain was collected without an observable");
    xs.push_back(t.g_integral);
  }
  return batch_mean_estimate(xs, "direct_transition_statistic");
}

CapacityEstimates capacity_estimate(const std::vector<SetLabel>& labels) {
  CapacityEstimates c;
  c.ab.method = "capacity_ab";
  c.ba.method = "capacity_ba";
  if (labels.size() < 2) return c;
  std::vector<double> ab(labels.size() - 1), ba(labels.size() - 1);
  for (std::size_t i = 0; i + 1 < labels.size(); ++i) {
    ab[i] = labels[i] == SetLabel::A && labels[i + 1] == SetLabel::B ? 1.0 : 0.0;
    ba[i] = labels[i] == SetLabel::B && labels[i + 1] == SetLabel::A ? 1.0 : 0.0;
  }
  const auto ms_ab = batch_means_stderr(ab);
  const auto ms_ba = batch_means_stderr(ba);
  c.ab.value = ms_ab.mean;
  c.ab.std_error = ms_ab.std_error;
  c.ab.n_samples = static_cast<long long>(ms_ab.n);
  c.ba.value = ms_ba.mean;
  c.ba.std_error = ms_ba.std_error;
  c.ba.n_samples = static_cast<long long>(ms_ba.n);
  return c;
}

PlusSideSamples plus_side_initialization(
    const MetastablePair& pair, const ForceField& field, const SimParams& params,
    const BoundaryMeasureSpec& pi_A_plus, const BoundaryMeasureSpec& pi_A_minus,
    const SurfaceSamplerParams& sampler_params, RngStream rng, std::size_t n, int n_threads,
    Observable observable) {
  if (pi_A_plus.side != BoundarySide::gamma_plus ||
      pi_A_minus.side != BoundarySide::gamma_minus)
    throw_invalid("plus_side_initialization: sides must be gamma_plus / gamma_minus");
  PlusSideSamples out;
  out.hit_B.assign(n, 0);
  out.tau_leg.assign(n, 0.0);
  out.g_leg.assign(n, 0.0);
  out.tau_plus0.assign(n, 0.0);
  out.g_plus0.assign(n, 0.0);
  std::size_t censored = 0;
  std::mutex censored_mutex;
  parallel_for(n, n_threads, [&](std::size_t i) {
    try {
      {
        RngStream stream = rng.substream(2 * i);
        BoundarySampler sampler(pi_A_plus, sampler_params);
        TrajectorySimulator sim(field, pair, params, stream);
        sim.reset(sampler.sample(stream));
        if (observable) sim.set_observable(observable);
        const auto leg = sim.run_until_side(BoundarySide::gamma_minus);
        out.hit_B[i] = leg.event.set_label == SetLabel::B ? 1 : 0;
        out.tau_leg[i] = leg.event.time;
        out.g_leg[i] = leg.g_integral;
      }
      {
        RngStream stream = rng.substream(2 * i + 1);
        BoundarySampler sampler(pi_A_minus, sampler_params);
        TrajectorySimulator sim(field, pair, params, stream);
        sim.reset(sampler.sample(stream));
        if (observable) sim.set_observable(observable);
        const auto leg = sim.run_until_side(BoundarySide::gamma_plus);
        out.tau_plus0[i] = leg.event.time;
        out.g_plus0[i] = leg.g_integral;
      }
    } catch (const TimeoutError&) {
      std::lock_guard<std::mutex> lock(censored_mutex);
      ++censored;
    }
  });
  if (censored > 0)
    throw TimeoutError("plus_side_initialization: " + std::to_string(censored) +
                           " censored legs out of " + std::to_string(n),
                       0.0, 0);
  return out;
}

Estimate plus_side_hit_probability(const PlusSideSamples& samples) {
  const double n = static_cast<double>(samples.hit_B.size());
  double k = 0.0;
  for (char h : samples.hit_B) k += h;
  Estimate e;
  e.value = k / n;
  e.std_error = std::sqrt(std::max(0.0, e.value * (1.0 - e.value) / n));
  e.n_samples = static_cast<long long>(samples.hit_B.size());
  e.method = "plus_side_hit_probability";
  return e;
}

Estimate plus_side_mean_time(const PlusSideSamples& samples) {
  const auto leg = mean_stderr(samples.tau_leg);
  const auto plus0 = mean_stderr(samples.tau_plus0);
  Estimate e;
  e.value = leg.mean + plus0.mean;
  e.std_error = std::sqrt(leg.std_error * leg.std_error + plus0.std_error * plus0.std_error);
  e.n_samples = static_cast<long long>(samples.tau_leg.size());
  e.method = "plus_side_mean_time";
  return e;
}

namespace {

// One stored excursion from Gamma^+ into the first Gamma^- entrance, at step
// resolution, so that AMS can rebranch from any recorded state.
struct ReplicaPath {
  std::vector<PhasePoint> states;
  std::vector<double> times;
  std::vector<double> g_cum;
  std::vector<double> xi;
  double xi_max = -std::numeric_limits<double>::infinity();
  bool success = false;
  double duration = 0.0;
  double g_total = 0.0;
};

void continue_replica(ReplicaPath& r, const MetastablePair& pair, const ForceField& field,
                      const SimParams& params, const ReactionCoordinate& xi,
                      RngStream stream, const Observable& observable) {
  TrajectorySimulator sim(field, pair, params, stream);
  sim.reset(r.states.back(), r.times.back());
  double g_run = r.g_cum.back();
  const long long budget = params.max_steps;
  long long used = 0;
  while (true) {
    if (used++ >= budget)
      throw TimeoutError("AMS replica exceeded max_steps", sim.time(), used);
    const PhasePoint x_before = sim.state();
    const double g_here = observable ? observable(x_before.q, x_before.p) : 0.0;
    const auto ev = sim.step_once();
    if (ev && ev->side == BoundarySide::gamma_minus) {
      const double s = (ev->time - (sim.time() - params.dt)) / params.dt;
      r.g_total = g_run + s * params.dt * g_here;
      r.duration = ev->time;
      r.success = ev->set_label == SetLabel::B;
      r.xi_max = std::max(r.xi_max, xi(ev->x.q));
      return;
    }
    g_run += params.dt * g_here;
    r.states.push_back(sim.state());
    r.times.push_back(sim.time());
    r.g_cum.push_back(g_run);
    const double xv = xi(sim.state().q);
    r.xi.push_back(xv);
    r.xi_max = std::max(r.xi_max, xv);
  }
}

ReplicaPath fresh_replica(const PhasePoint& x0, const MetastablePair& pair,
                          const ForceField& field, const SimParams& params,
                          const ReactionCoordinate& xi, RngStream stream,
                          const Observable& observable) {
  ReplicaPath r;
  r.states.push_back(x0);
  r.times.push_back(0.0);
  r.g_cum.push_back(0.0);
  r.xi.push_back(xi(x0.q));
  r.xi_max = r.xi.back();
  continue_replica(r, pair, field, params, xi, stream, observable);
  return r;
}

}  // namespace

AmsResult ams_probability(const MetastablePair& pair, const ForceField& field,
                          const SimParams& params, const BoundaryMeasureSpec& pi_A_plus,
                          const SurfaceSamplerParams& sampler_params, const AmsParams& ams,
                          RngStream rng, Observable observable) {
  ams.validate();
  if (pi_A_plus.side != BoundarySide::gamma_plus)
    throw_invalid("ams_probability: replicas must start from a gamma_plus measure");
  const int n = ams.n_replicas;

  std::uint64_t stream_counter = 0;
  auto next_stream = [&]() { return rng.substream(stream_counter++); };

  std::vector<ReplicaPath> replicas(n);
  {
    std::vector<PhasePoint> starts(n);
    for (int i = 0; i < n; ++i) {
      RngStream s = next_stream();
      BoundarySampler sampler(pi_A_plus, sampler_params);
      starts[i] = sampler.sample(s);
      replicas[i] = fresh_replica(starts[i], pair, field, params, ams.reaction_coordinate,
                                  next_stream(), observable);
    }
  }

  AmsResult result;
  double log_factor = 0.0;
  while (true) {
    std::vector<int> alive;  // not yet in B
    for (int i = 0; i < n; ++i)
      if (!replicas[i].success) alive.push_back(i);
    if (alive.empty()) break;
    if (result.iterations++ >= ams.max_iterations)
      throw_numerical("ams_probability: exceeded max_iterations");

    // level = k-th smallest non-success score; kill everything at or below it
    std::vector<double> scores;
    scores.reserve(alive.size());
    for (int i : alive) scores.push_back(replicas[i].xi_max);
    const std::size_t k = std::min<std::size_t>(ams.kill_count, scores.size());
    std::nth_element(scores.begin(), scores.begin() + (k - 1), scores.end());
    const double level = scores[k - 1];

    std::vector<int> killed;
    for (int i : alive)
      if (replicas[i].xi_max <= level) killed.push_back(i);
    if (static_cast<int>(killed.size()) == n)
      throw Error(Errc::degenerate_ams,
                  "ams_probability: extinction, all replicas stuck at level " +
                      std::to_string(level));

    log_factor += std::log1p(-static_cast<double>(killed.size()) / n);

    std::vector<char> is_killed(n, 0);
    for (int i : killed) is_killed[i] = 1;
    std::vector<int> survivors;
    for (int i = 0; i < n; ++i)
      if (!is_killed[i]) survivors.push_back(i);

    for (int i : killed) {
      const int donor = survivors[rng.uniform_index(survivors.size())];
      const ReplicaPath& src = replicas[donor];
      ReplicaPath branch;
      std::size_t cut = 0;
      while (cut < src.xi.size() && !(src.xi[cut] > level)) ++cut;
      // a successful donor may have crossed into B between recorded states;
      // branch from its last recorded state then
      if (cut >= src.xi.size()) cut = src.xi.size() - 1;
      branch.states.assign(src.states.begin(), src.states.begin() + cut + 1);
      branch.times.assign(src.times.begin(), src.times.begin() + cut + 1);
      branch.g_cum.assign(src.g_cum.begin(), src.g_cum.begin() + cut + 1);
      branch.xi.assign(src.xi.begin(), src.xi.begin() + cut + 1);
      branch.xi_max = *std::max_element(branch.xi.begin(), branch.xi.end());
      continue_replica(branch, pair, field, params, ams.reaction_coordinate, next_stream(),
                       observable);
      replicas[i] = std::move(branch);
      ++result.branchings;
    }
  }

  const double p = std::exp(log_factor);
  result.p_hat.value = p;
  // idealized large-n variance p^2 (-ln p)/n; repetition-based errors are
  // preferred for tight comparisons
  result.p_hat.std_error = p * std::sqrt(std::max(0.0, -std::log(p)) / n);
  result.p_hat.n_samples = n;
  result.p_hat.method = "ams_last_particle";
  for (const auto& r : replicas) {
    result.reactive_durations.push_back(r.duration);
    result.reactive_g.push_back(r.g_total);
  }
  return result;
}

}  // namespace hillgate
