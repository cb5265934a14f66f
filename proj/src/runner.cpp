#include "hillgate/runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hillgate/boundary_sampler.hpp"
#include "hillgate/chains.hpp"
#include "hillgate/estimators.hpp"
#include "hillgate/harris_oracle.hpp"
#include "hillgate/parallel.hpp"
#include "hillgate/version.hpp"

namespace hillgate::runner {

namespace {

using nlohmann::json;

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string hash_hex(std::uint64_t h) {
  std::ostringstream os;
  os << "0x" << std::hex << h;
  return os.str();
}

json estimate_json(const Estimate& e) {
  return {{"method", e.method},
          {"value", e.value},
          {"std_error", e.std_error},
          {"n", e.n_samples}};
}

json base_summary(const ExperimentConfig& cfg, const std::string& command) {
  return {{"format_version", 1},
          {"command", command},
          {"config_hash", hash_hex(cfg.hash())},
          {"seed", cfg.seed},
          {"dt", cfg.dt},
          {"version", std::string("hillgate ") + kVersion},
          {"estimates", json::array()},
          {"counters", {{"gamma_zero_discards", 0}, {"side_mismatch_discards", 0}}}};
}

void write_summary(const json& summary, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ofstream out(out_dir + "/summary.json");
  if (!out) throw Error(Errc::config, "cannot write " + out_dir + "/summary.json");
  out << summary.dump(2) << "\n";
}

void set_counters(json& summary, const EventCounters& c) {
  summary["counters"]["gamma_zero_discards"] = c.gamma_zero_discards;
  summary["counters"]["side_mismatch_discards"] = c.side_mismatch_discards;
}

}  // namespace

json run_sample_boundary(const ExperimentConfig& cfg) {
  Timer timer;
  const auto field = cfg.make_field();
  const auto pair = cfg.make_pair();
  PairBoundarySampler sampler(pair, field, cfg.beta, BoundarySide::gamma_minus,
                              cfg.make_sampler_params());
  RngStream rng(cfg.seed, 0);

  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream csv(cfg.out_dir + "/samples.csv");
  csv.precision(17);
  const int d = pair.dimension();
  csv << "index";
  for (int i = 0; i < d; ++i) csv << ",q" << i;
  for (int i = 0; i < d; ++i) csv << ",p" << i;
  csv << ",pn,set\n";
  for (std::uint64_t k = 0; k < cfg.n_samples; ++k) {
    const auto [x, label] = sampler.sample(rng);
    const auto n = pair.region(label).outward_normal(x.q);
    csv << k;
    for (double v : x.q) csv << ',' << v;
    for (double v : x.p) csv << ',' << v;
    csv << ',' << dot(x.p, n) << ',' << to_string(label) << '\n';
  }

  auto summary = base_summary(cfg, "sample-boundary");
  const auto z = z_constants(pair, field, cfg.beta);
  summary["n_samples"] = cfg.n_samples;
  summary["z_plus"] = z.z_plus;
  summary["z_minus"] = z.z_minus;
  summary["weight_A"] = sampler.weight_A();
  summary["wall_time_s"] = timer.seconds();
  write_summary(summary, cfg.out_dir);
  return summary;
}

json run_simulate_direct(const ExperimentConfig& cfg) {
  Timer timer;
  const auto field = cfg.make_field();
  const auto pair = cfg.make_pair();
  const auto params = cfg.make_sim_params();
  const auto observable = cfg.make_observable();

  RngStream rng(cfg.seed, 0);
  Vec q0 = cfg.center_a;
  const auto chain = run_collect_chain({q0, Vec(q0.size(), 0.0)}, field, pair, params, rng,
                                       cfg.n_events, observable);

  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream csv(cfg.out_dir + "/chain.csv");
  write_chain_csv(csv, chain);

  const auto entries = entry_subchain(chain);
  auto summary = base_summary(cfg, "simulate-direct");
  summary["n_events"] = cfg.n_events;
  summary["n_entries"] = entries.size();
  summary["estimates"].push_back(estimate_json(direct_transition_time(entries)));
  if (observable)
    summary["estimates"].push_back(estimate_json(direct_transition_statistic(entries)));
  const auto cap = capacity_estimate(labels_of(entries));
  summary["estimates"].push_back(estimate_json(cap.ab));
  summary["estimates"].push_back(estimate_json(cap.ba));
  set_counters(summary, chain.counters);
  summary["wall_time_s"] = timer.seconds();
  write_summary(summary, cfg.out_dir);
  return summary;
}

json run_estimate_hill(const ExperimentConfig& cfg) {
  Timer timer;
  const auto field = cfg.make_field();
  const auto pair = cfg.make_pair();
  const auto params = cfg.make_sim_params();
  const auto observable = cfg.make_observable();

  EventCounters counters;
  const auto excursions = collect_excursions(
      pair, field, params, cfg.boundary_spec(SetLabel::A, BoundarySide::gamma_minus),
      cfg.make_sampler_params(), RngStream(cfg.seed, 0), cfg.n_samples, cfg.threads,
      observable, &counters);

  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream csv(cfg.out_dir + "/samples.csv");
  csv.precision(17);
  csv << "index,tau1,hit_B,g_integral\n";
  for (std::size_t i = 0; i < excursions.size(); ++i)
    csv << i << ',' << excursions[i].tau1 << ',' << (excursions[i].hit_B ? 1 : 0) << ','
        << excursions[i].g_integral << '\n';

  auto summary = base_summary(cfg, "estimate-hill");
  summary["n_excursions"] = excursions.size();
  const std::string which = "," + cfg.estimators + ",";
  if (which.find(",hill,") != std::string::npos)
    summary["estimates"].push_back(estimate_json(hill_statistic(excursions)));
  if (which.find(",decomposed,") != std::string::npos)
    summary["estimates"].push_back(estimate_json(decomposed_hill(excursions)));
  if (observable)
    summary["estimates"].push_back(
        estimate_json(hill_statistic(excursions, HillMode::observable)));
  set_counters(summary, counters);
  summary["wall_time_s"] = timer.seconds();
  write_summary(summary, cfg.out_dir);
  return summary;
}

json run_estimate_ams(const ExperimentConfig& cfg) {
  Timer timer;
  const auto field = cfg.make_field();
  const auto pair = cfg.make_pair();
  const auto params = cfg.make_sim_params();
  const auto spec_plus = cfg.boundary_spec(SetLabel::A, BoundarySide::gamma_plus);
  const auto spec_minus = cfg.boundary_spec(SetLabel::A, BoundarySide::gamma_minus);

  // tau_0^+ legs and crude reference from the plus side
  const auto ps =
      plus_side_initialization(pair, field, params, spec_plus, spec_minus,
                               cfg.make_sampler_params(), RngStream(cfg.seed, 1),
                               cfg.n_samples, cfg.threads);
  const auto crude = plus_side_hit_probability(ps);

  // independent AMS repetitions on disjoint substreams; errors across runs
  const int repeats = cfg.repeats;
  std::vector<AmsResult> runs(repeats);
  RngStream ams_rng(cfg.seed, 2);
  {
    const auto ams_params = cfg.make_ams_params();
    const auto sampler_params = cfg.make_sampler_params();
    parallel_for(repeats, cfg.threads, [&](std::size_t r) {
      runs[r] = ams_probability(pair, field, params, spec_plus, sampler_params, ams_params,
                                ams_rng.substream(r));
    });
  }
  std::vector<double> phats, reach_all;
  long long iterations = 0;
  std::uint64_t branchings = 0;
  for (const auto& run : runs) {
    phats.push_back(run.p_hat.value);
    reach_all.insert(reach_all.end(), run.reactive_durations.begin(),
                     run.reactive_durations.end());
    iterations += run.iterations;
    branchings += run.branchings;
  }
  Estimate p_ams;
  if (repeats > 1) {
    const auto ms = mean_stderr(phats);
    p_ams = {ms.mean, ms.std_error, repeats, "ams_last_particle", cfg.seed};
  } else {
    p_ams = runs.front().p_hat;
    p_ams.seed = cfg.seed;
  }

  // stay-branch statistics from the pi_{A-} excursions
  const auto excursions =
      collect_excursions(pair, field, params, spec_minus, cfg.make_sampler_params(),
                         RngStream(cfg.seed, 3), cfg.n_samples, cfg.threads);
  std::vector<double> stay;
  for (const auto& e : excursions)
    if (!e.hit_B) stay.push_back(e.tau1);
  const auto ms_stay = mean_stderr(stay);
  const auto ms_tau0 = mean_stderr(ps.tau_plus0);
  const auto ms_reach = mean_stderr(reach_all);

  HillComponents parts;
  parts.tau_stay = {ms_stay.mean, ms_stay.std_error,
                    static_cast<long long>(ms_stay.n), "tau_stay", cfg.seed};
  parts.p_reach = p_ams;
  // reach times from the AMS reactive ensembles, corrected by the tau_0^+ leg
  parts.tau_reach = {ms_tau0.mean + ms_reach.mean,
                     std::sqrt(ms_tau0.std_error * ms_tau0.std_error +
                               ms_reach.std_error * ms_reach.std_error),
                     static_cast<long long>(ms_reach.n), "tau_reach_corrected", cfg.seed};
  auto t_ab = decomposed_hill(parts);
  t_ab.method = "decomposed_hill_ams";

  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream csv(cfg.out_dir + "/samples.csv");
  csv.precision(17);
  csv << "index,reactive_duration\n";
  for (std::size_t i = 0; i < reach_all.size(); ++i)
    csv << i << ',' << reach_all[i] << '\n';

  auto summary = base_summary(cfg, "estimate-ams");
  summary["estimates"].push_back(estimate_json(crude));
  summary["estimates"].push_back(estimate_json(p_ams));
  summary["estimates"].push_back(estimate_json(parts.tau_stay));
  summary["estimates"].push_back(estimate_json(parts.tau_reach));
  summary["estimates"].push_back(estimate_json(t_ab));
  summary["ams_repeats"] = repeats;
  summary["ams_iterations"] = iterations;
  summary["ams_branchings"] = branchings;
  summary["wall_time_s"] = timer.seconds();
  write_summary(summary, cfg.out_dir);
  return summary;
}

json run_oracle(int n_random, int max_states, std::uint64_t seed, const std::string& out_dir) {
  Timer timer;
  if (n_random < 1 || max_states < 2) throw_invalid("oracle: need n_random >= 1, max_states >= 2");
  RngStream rng(seed, 0);
  double worst_hill = 0.0, worst_rep = 0.0, worst_trace = 0.0;
  for (int t = 0; t < n_random; ++t) {
    const auto chain =
        oracle::random_chain(2 + static_cast<int>(rng.uniform_index(max_states - 1)), rng);
    const auto pi = oracle::stationary(chain);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(chain.size());
    for (int i = 0; i < chain.size(); ++i)
      if (chain.partition[i] == SetLabel::A) g(i) = rng.uniform(0.0, 2.0);
    const double lhs = oracle::hill_lhs(chain, g);
    const double rhs = oracle::hill_rhs(chain, pi, g);
    worst_hill = std::max(worst_hill, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));

    std::vector<int> C;
    for (int i = 0; i < chain.size(); ++i)
      if (rng.uniform() < 0.5) C.push_back(i);
    if (C.empty()) C.push_back(0);
    Eigen::VectorXd h(chain.size());
    for (int i = 0; i < chain.size(); ++i) h(i) = rng.uniform(-1.0, 1.0);
    const auto rc = oracle::representation_check(chain, pi, C, h);
    worst_rep = std::max(worst_rep, std::abs(rc.lhs - rc.rhs) / (1.0 + std::abs(rc.rhs)));

    // trace of the pair chain on B x A reproduces the reactive entrance law
    const auto rd = oracle::reactive_distributions(chain, pi);
    const auto pc = oracle::pair_chain(chain);
    std::vector<int> ba;
    const int n = chain.size();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (chain.partition[i] == SetLabel::B && chain.partition[j] == SetLabel::A)
          ba.push_back(i * n + j);
    const auto tr = oracle::trace_chain(pc, ba);
    const auto pit = oracle::stationary(tr);
    Eigen::VectorXd nu = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < ba.size(); ++k) nu(ba[k] % n) += pit(k);
    worst_trace = std::max(worst_trace, (nu - rd.nu_re_A).lpNorm<Eigen::Infinity>());
  }

  json summary = {{"format_version", 1},
                  {"command", "oracle"},
                  {"seed", seed},
                  {"n_random", n_random},
                  {"max_states", max_states},
                  {"worst_hill_deviation", worst_hill},
                  {"worst_representation_deviation", worst_rep},
                  {"worst_trace_deviation", worst_trace},
                  {"tolerance", 1e-10},
                  {"pass", worst_hill <= 1e-10 && worst_rep <= 1e-10 && worst_trace <= 1e-10},
                  {"version", std::string("hillgate ") + kVersion}};
  summary["wall_time_s"] = timer.seconds();
  write_summary(summary, out_dir);
  return summary;
}

json run_validate(const ExperimentConfig& cfg, const ValidationOptions& opts) {
  Timer timer;
  const auto results = run_acceptance_suite(opts);
  json criteria = json::array();
  for (const auto& r : results)
    criteria.push_back({{"id", r.id},
                        {"name", r.name},
                        {"pass", r.pass},
                        {"details", r.details},
                        {"seconds", r.seconds}});
  auto summary = base_summary(cfg, "validate");
  summary.erase("counters");
  summary["quick"] = opts.quick;
  summary["criteria"] = criteria;
  summary["pass"] = all_passed(results);
  summary["wall_time_s"] = timer.seconds();
  write_summary(summary, cfg.out_dir);
  return summary;
}

}  // namespace hillgate::runner
