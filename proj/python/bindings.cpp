#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hillgate/boundary_sampler.hpp"
#include "hillgate/chains.hpp"
#include "hillgate/estimators.hpp"
#include "hillgate/fields.hpp"
#include "hillgate/geometry.hpp"
#include "hillgate/harris_oracle.hpp"
#include "hillgate/integrator.hpp"
#include "hillgate/rng.hpp"
#include "hillgate/validation.hpp"
#include "hillgate/version.hpp"

namespace py = pybind11;
using namespace hillgate;

namespace {

Observable make_observable(const py::object& obj) {
  if (obj.is_none()) return nullptr;
  auto fn = obj.cast<py::function>();
  return [fn](const Vec& q, const Vec& p) { return fn(q, p).cast<double>(); };
}

}  // namespace

PYBIND11_MODULE(_hillgate, m) {
  m.doc() = "Transition statistics of the Langevin dynamics via the Hill relation";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "HillgateError");

  py::enum_<SetLabel>(m, "SetLabel").value("A", SetLabel::A).value("B", SetLabel::B);
  py::enum_<BoundarySide>(m, "BoundarySide")
      .value("gamma_plus", BoundarySide::gamma_plus)
      .value("gamma_minus", BoundarySide::gamma_minus)
      .value("gamma_zero", BoundarySide::gamma_zero);
  py::enum_<Scheme>(m, "Scheme")
      .value("baoab", Scheme::baoab)
      .value("euler_maruyama", Scheme::euler_maruyama);

  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream_id") = 0)
      .def("uniform", [](RngStream& r) { return r.uniform(); })
      .def("normal", &RngStream::normal)
      .def("substream", &RngStream::substream);

  py::class_<PotentialSpec>(m, "PotentialSpec")
      .def_static("double_well_1d", &PotentialSpec::double_well_1d, py::arg("a"),
                  py::arg("height"))
      .def_static("radial_double_well", &PotentialSpec::radial_double_well, py::arg("center1"),
                  py::arg("center2"), py::arg("stiffness"))
      .def_static("harmonic", &PotentialSpec::harmonic, py::arg("center"),
                  py::arg("stiffness"));

  py::class_<ForceField>(m, "ForceField")
      .def_static("conservative", &ForceField::conservative, py::arg("potential"),
                  py::arg("dimension"))
      .def_property_readonly("dimension", &ForceField::dimension)
      .def_property_readonly("is_conservative", &ForceField::is_conservative)
      .def("force", &ForceField::force, py::arg("q"))
      .def("potential_energy", &ForceField::potential_energy, py::arg("q"))
      .def("hamiltonian", &ForceField::hamiltonian, py::arg("q"), py::arg("p"))
      .def("gibbs_log_density", &ForceField::gibbs_log_density, py::arg("q"), py::arg("p"),
           py::arg("beta"));

  py::class_<LevelSetRegion>(m, "LevelSetRegion")
      .def_static("ball", &LevelSetRegion::ball, py::arg("center"), py::arg("radius"),
                  py::arg("label"))
      .def("phi", &LevelSetRegion::phi)
      .def("outward_normal",
           [](const LevelSetRegion& r, const Vec& q) { return r.outward_normal(q); })
      .def("classify_boundary",
           [](const LevelSetRegion& r, const Vec& q, const Vec& p) {
             return r.classify_boundary(q, p);
           })
      .def_property_readonly("label", &LevelSetRegion::label);

  py::enum_<Location>(m, "Location")
      .value("inside_A", Location::inside_A)
      .value("inside_B", Location::inside_B)
      .value("outside", Location::outside)
      .value("near_boundary_A", Location::near_boundary_A)
      .value("near_boundary_B", Location::near_boundary_B);

  py::class_<MetastablePair>(m, "MetastablePair")
      .def(py::init<LevelSetRegion, LevelSetRegion, double>(), py::arg("region_a"),
           py::arg("region_b"), py::arg("min_separation") = 1e-8)
      .def("locate", [](const MetastablePair& p, const Vec& q) { return p.locate(q); })
      .def_property_readonly("separation", &MetastablePair::separation)
      .def("region", &MetastablePair::region, py::return_value_policy::reference_internal);

  py::class_<PhasePoint>(m, "PhasePoint")
      .def(py::init<Vec, Vec>(), py::arg("q"), py::arg("p"))
      .def_readwrite("q", &PhasePoint::q)
      .def_readwrite("p", &PhasePoint::p)
      .def("momentum_reversed", &PhasePoint::momentum_reversed);

  py::class_<ThermoParams>(m, "ThermoParams")
      .def(py::init([](double gamma, double beta) { return ThermoParams{gamma, beta}; }),
           py::arg("gamma"), py::arg("beta"))
      .def_readwrite("gamma", &ThermoParams::gamma)
      .def_readwrite("beta", &ThermoParams::beta);

  py::class_<SimParams>(m, "SimParams")
      .def(py::init<>())
      .def_readwrite("thermo", &SimParams::thermo)
      .def_readwrite("dt", &SimParams::dt)
      .def_readwrite("scheme", &SimParams::scheme)
      .def_readwrite("max_steps", &SimParams::max_steps)
      .def_readwrite("crossing_tol", &SimParams::crossing_tol)
      .def_readwrite("tol_tangent", &SimParams::tol_tangent)
      .def_readwrite("noise_scale", &SimParams::noise_scale);

  py::class_<CrossingEvent>(m, "CrossingEvent")
      .def_readonly("x", &CrossingEvent::x)
      .def_readonly("time", &CrossingEvent::time)
      .def_readonly("side", &CrossingEvent::side)
      .def_readonly("set_label", &CrossingEvent::set_label);

  py::class_<BoundaryChain>(m, "BoundaryChain")
      .def_readonly("events", &BoundaryChain::events)
      .def_readonly("accumulators", &BoundaryChain::accumulators)
      .def("__len__", &BoundaryChain::size);

  m.def("step", &step, py::arg("x"), py::arg("field"), py::arg("params"), py::arg("rng"));
  m.def(
      "run_until_entry",
      [](const PhasePoint& x0, const ForceField& field, const MetastablePair& pair,
         const SimParams& params, RngStream& rng) {
        py::gil_scoped_release release;
        const auto r = run_until_entry(x0, field, pair, params, rng);
        return py::make_tuple(r.event, r.elapsed, r.steps);
      },
      py::arg("x0"), py::arg("field"), py::arg("pair"), py::arg("params"), py::arg("rng"));
  m.def(
      "run_until_exit",
      [](const PhasePoint& x0, const ForceField& field, const MetastablePair& pair,
         const SimParams& params, RngStream& rng) {
        py::gil_scoped_release release;
        const auto r = run_until_exit(x0, field, pair, params, rng);
        return py::make_tuple(r.event, r.elapsed, r.steps);
      },
      py::arg("x0"), py::arg("field"), py::arg("pair"), py::arg("params"), py::arg("rng"));
  m.def(
      "run_collect_chain",
      [](const PhasePoint& x0, const ForceField& field, const MetastablePair& pair,
         const SimParams& params, RngStream& rng, std::size_t n_events,
         const py::object& observable) {
        const auto obs = make_observable(observable);
        if (!obs) {
          py::gil_scoped_release release;
          return run_collect_chain(x0, field, pair, params, rng, n_events, nullptr);
        }
        return run_collect_chain(x0, field, pair, params, rng, n_events, obs);
      },
      py::arg("x0"), py::arg("field"), py::arg("pair"), py::arg("params"), py::arg("rng"),
      py::arg("n_events"), py::arg("observable") = py::none());

  py::class_<ReactiveIndexing>(m, "ReactiveIndexing")
      .def_readonly("eta_re_A", &ReactiveIndexing::eta_re_A)
      .def_readonly("eta_re_B", &ReactiveIndexing::eta_re_B)
      .def_readonly("eta_ex_A", &ReactiveIndexing::eta_ex_A)
      .def_readonly("eta_ex_B", &ReactiveIndexing::eta_ex_B);
  m.def("reactive_indexing", &reactive_indexing, py::arg("labels"));
  m.def("entry_subchain", &entry_subchain);
  m.def("exit_subchain", &exit_subchain);
  m.def("labels_of", &labels_of);

  py::class_<TransitionSample>(m, "TransitionSample")
      .def_readonly("duration", &TransitionSample::duration)
      .def_readonly("g_integral", &TransitionSample::g_integral);
  m.def("transition_samples", &transition_samples);
  m.def("empirical_reactive_entrance", &empirical_reactive_entrance, py::arg("entry_chain"),
        py::arg("target"));
  m.def("empirical_reactive_exit", &empirical_reactive_exit, py::arg("entry_chain"),
        py::arg("target"));

  py::class_<BoundaryMeasureSpec>(m, "BoundaryMeasureSpec")
      .def(py::init([](const LevelSetRegion& region, const ForceField& field, double beta,
                       BoundarySide side) {
             return BoundaryMeasureSpec{region, field, beta, side};
           }),
           py::arg("region"), py::arg("field"), py::arg("beta"), py::arg("side"));
  py::class_<SurfaceSamplerParams>(m, "SurfaceSamplerParams")
      .def(py::init<>())
      .def_readwrite("n_burnin", &SurfaceSamplerParams::n_burnin)
      .def_readwrite("proposal_scale", &SurfaceSamplerParams::proposal_scale)
      .def_readwrite("n_thin", &SurfaceSamplerParams::n_thin);
  py::class_<BoundarySampler>(m, "BoundarySampler")
      .def(py::init<BoundaryMeasureSpec, SurfaceSamplerParams>(), py::arg("spec"),
           py::arg("params") = SurfaceSamplerParams{})
      .def("sample", &BoundarySampler::sample, py::arg("rng"))
      .def("density", &BoundarySampler::density, py::arg("x"));
  m.def("sample_velocity", &sample_velocity, py::arg("n"), py::arg("beta"), py::arg("side"),
        py::arg("rng"));
  m.def("velocity_from_gaussians", &velocity_from_gaussians, py::arg("n"), py::arg("beta"),
        py::arg("side"), py::arg("gaussians"));
  m.def("density_pi", &density_pi, py::arg("spec"), py::arg("x"));
  m.def(
      "z_constants",
      [](const MetastablePair& pair, const ForceField& field, double beta) {
        const auto z = z_constants(pair, field, beta);
        return py::make_tuple(z.z_plus, z.z_minus);
      },
      py::arg("pair"), py::arg("field"), py::arg("beta"));

  py::class_<ExcursionSample>(m, "ExcursionSample")
      .def_readonly("tau1", &ExcursionSample::tau1)
      .def_readonly("hit_B", &ExcursionSample::hit_B)
      .def_readonly("g_integral", &ExcursionSample::g_integral);
  py::class_<Estimate>(m, "Estimate")
      .def_readonly("value", &Estimate::value)
      .def_readonly("std_error", &Estimate::std_error)
      .def_readonly("n_samples", &Estimate::n_samples)
      .def_readonly("method", &Estimate::method)
      .def("__repr__", [](const Estimate& e) {
        return "<Estimate " + e.method + " = " + std::to_string(e.value) + " +- " +
               std::to_string(e.std_error) + ">";
      });
  py::enum_<HillMode>(m, "HillMode")
      .value("mean_time", HillMode::mean_time)
      .value("observable", HillMode::observable);

  m.def(
      "collect_excursions",
      [](const MetastablePair& pair, const ForceField& field, const SimParams& params,
         const BoundaryMeasureSpec& spec, const SurfaceSamplerParams& sp, RngStream rng,
         std::size_t n, int n_threads, const py::object& observable) {
        const auto obs = make_observable(observable);
        if (!obs) {
          py::gil_scoped_release release;
          return collect_excursions(pair, field, params, spec, sp, rng, n, n_threads, nullptr);
        }
        // python callbacks require the GIL: run single-threaded
        return collect_excursions(pair, field, params, spec, sp, rng, n, 1, obs);
      },
      py::arg("pair"), py::arg("field"), py::arg("params"), py::arg("pi_A_minus"),
      py::arg("sampler_params") = SurfaceSamplerParams{}, py::arg("rng"), py::arg("n"),
      py::arg("n_threads") = 1, py::arg("observable") = py::none());
  m.def("hill_statistic", &hill_statistic, py::arg("excursions"),
        py::arg("mode") = HillMode::mean_time);
  m.def("decomposed_hill",
        py::overload_cast<const std::vector<ExcursionSample>&, HillMode>(&decomposed_hill),
        py::arg("excursions"), py::arg("mode") = HillMode::mean_time);
  m.def("direct_transition_time", &direct_transition_time, py::arg("entry_chain"));
  m.def("direct_transition_statistic", &direct_transition_statistic, py::arg("entry_chain"));
  m.def(
      "capacity_estimate",
      [](const std::vector<SetLabel>& labels) {
        const auto c = capacity_estimate(labels);
        return py::make_tuple(c.ab, c.ba);
      },
      py::arg("labels"));

  py::class_<PlusSideSamples>(m, "PlusSideSamples")
      .def_readonly("hit_B", &PlusSideSamples::hit_B)
      .def_readonly("tau_leg", &PlusSideSamples::tau_leg)
      .def_readonly("tau_plus0", &PlusSideSamples::tau_plus0);
  m.def(
      "plus_side_initialization",
      [](const MetastablePair& pair, const ForceField& field, const SimParams& params,
         const BoundaryMeasureSpec& plus, const BoundaryMeasureSpec& minus,
         const SurfaceSamplerParams& sp, RngStream rng, std::size_t n, int n_threads) {
        py::gil_scoped_release release;
        return plus_side_initialization(pair, field, params, plus, minus, sp, rng, n,
                                        n_threads, nullptr);
      },
      py::arg("pair"), py::arg("field"), py::arg("params"), py::arg("pi_A_plus"),
      py::arg("pi_A_minus"), py::arg("sampler_params") = SurfaceSamplerParams{},
      py::arg("rng"), py::arg("n"), py::arg("n_threads") = 1);
  m.def("plus_side_hit_probability", &plus_side_hit_probability);
  m.def("plus_side_mean_time", &plus_side_mean_time);

  py::class_<AmsParams>(m, "AmsParams")
      .def(py::init<>())
      .def_readwrite("n_replicas", &AmsParams::n_replicas)
      .def_readwrite("kill_count", &AmsParams::kill_count)
      .def_readwrite("level_B", &AmsParams::level_B)
      .def("set_reaction_coordinate", [](AmsParams& a, const py::function& fn) {
        a.reaction_coordinate = [fn](const Vec& q) { return fn(q).cast<double>(); };
      });
  py::class_<AmsResult>(m, "AmsResult")
      .def_readonly("p_hat", &AmsResult::p_hat)
      .def_readonly("reactive_durations", &AmsResult::reactive_durations)
      .def_readonly("iterations", &AmsResult::iterations);
  m.def("ams_probability", &ams_probability, py::arg("pair"), py::arg("field"),
        py::arg("params"), py::arg("pi_A_plus"),
        py::arg("sampler_params") = SurfaceSamplerParams{}, py::arg("ams"), py::arg("rng"),
        py::arg("observable") = nullptr);

  // finite-chain oracle
  auto oracle_mod = m.def_submodule("oracle", "exact finite-chain identities");
  py::class_<oracle::FiniteChain>(oracle_mod, "FiniteChain")
      .def(py::init([](const Eigen::MatrixXd& P, const std::vector<SetLabel>& partition) {
             oracle::FiniteChain c;
             c.P = P;
             c.partition = partition;
             c.validate();
             return c;
           }),
           py::arg("P"), py::arg("partition"))
      .def_readonly("P", &oracle::FiniteChain::P)
      .def_readonly("partition", &oracle::FiniteChain::partition)
      .def("__len__", &oracle::FiniteChain::size);
  oracle_mod.def("stationary", &oracle::stationary);
  oracle_mod.def(
      "reactive_distributions",
      [](const oracle::FiniteChain& c, const Eigen::VectorXd& pi) {
        const auto rd = oracle::reactive_distributions(c, pi);
        py::dict d;
        d["nu_re_A"] = rd.nu_re_A;
        d["nu_ex_A"] = rd.nu_ex_A;
        d["nu_re_B"] = rd.nu_re_B;
        d["nu_ex_B"] = rd.nu_ex_B;
        d["cap_AB"] = rd.cap_AB;
        d["cap_BA"] = rd.cap_BA;
        return d;
      },
      py::arg("chain"), py::arg("pi"));
  oracle_mod.def("hill_lhs", &oracle::hill_lhs, py::arg("chain"), py::arg("g"));
  oracle_mod.def("hill_rhs", &oracle::hill_rhs, py::arg("chain"), py::arg("pi"), py::arg("g"));
  oracle_mod.def(
      "representation_check",
      [](const oracle::FiniteChain& c, const Eigen::VectorXd& pi, const std::vector<int>& C,
         const Eigen::VectorXd& g) {
        const auto rc = oracle::representation_check(c, pi, C, g);
        return py::make_tuple(rc.lhs, rc.rhs);
      },
      py::arg("chain"), py::arg("pi"), py::arg("C"), py::arg("g"));
  oracle_mod.def("pair_chain", &oracle::pair_chain);
  oracle_mod.def("trace_chain", &oracle::trace_chain, py::arg("chain"), py::arg("C"));
  oracle_mod.def(
      "random_chain",
      [](int n_states, std::uint64_t seed) {
        RngStream rng(seed, 0);
        return oracle::random_chain(n_states, rng);
      },
      py::arg("n_states"), py::arg("seed"));
  oracle_mod.def(
      "renewal_pair_check",
      [](const oracle::FiniteChain& c, const std::vector<int>& g) {
        const auto r = oracle::renewal_pair_check(c, g);
        py::dict d;
        d["conclusive"] = r.conclusive;
        d["factorized"] = r.factorized;
        d["max_total_variation"] = r.max_total_variation;
        d["mean_score"] = r.mean_score;
        return d;
      },
      py::arg("chain"), py::arg("g"));

  // validation suite
  m.def(
      "run_acceptance_suite",
      [](bool quick, int threads, std::uint64_t seed) {
        ValidationOptions opts;
        opts.quick = quick;
        opts.threads = threads;
        opts.seed = seed;
        std::vector<py::dict> out;
        py::list results;
        {
          std::vector<CriterionResult> rs;
          {
            py::gil_scoped_release release;
            rs = run_acceptance_suite(opts);
          }
          for (const auto& r : rs) {
            py::dict d;
            d["id"] = r.id;
            d["name"] = r.name;
            d["pass"] = r.pass;
            d["details"] = r.details;
            d["seconds"] = r.seconds;
            results.append(d);
          }
        }
        return results;
      },
      py::arg("quick") = true, py::arg("threads") = 1, py::arg("seed") = 20260811);
}
