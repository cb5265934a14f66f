#include "hillgate/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hillgate {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_vec(const Vec& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  return os.str();
}

Vec parse_vec(const std::string& s, const std::string& key) {
  Vec v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      v.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(Errc::config, "config: bad number '" + item + "' for key " + key);
    }
  }
  if (v.empty()) throw Error(Errc::config, "config: empty vector for key " + key);
  return v;
}

double parse_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw Error(Errc::config, "config: bad number '" + s + "' for key " + key);
  }
}

long long parse_int(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw Error(Errc::config, "config: bad integer '" + s + "' for key " + key);
  }
}

using SectionMap = std::map<std::string, std::map<std::string, std::string>>;

SectionMap parse_sections(const std::string& text) {
  SectionMap sections;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw Error(Errc::config, "config: malformed section header at line " +
                                      std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::config, "config: expected key = value at line " +
                                    std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw Error(Errc::config, "config: empty key at line " + std::to_string(lineno));
    if (!sections[section].emplace(key, value).second)
      throw Error(Errc::config, "config: duplicate key '" + key + "' in section [" +
                                    section + "]");
  }
  return sections;
}

// Tracks which keys were consumed so that leftovers can be reported as
// unknown (strict mode).
class SectionReader {
 public:
  SectionReader(SectionMap& sections, std::string name)
      : name_(std::move(name)), entries_(sections[name_]) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::string require(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end())
      throw Error(Errc::config,
                  "config: missing required key '" + key + "' in section [" + name_ + "]");
    used_.insert(key);
    return it->second;
  }
  std::string get(const std::string& key, const std::string& fallback) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    used_.insert(key);
    return it->second;
  }
  void finish() const {
    for (const auto& [key, value] : entries_)
      if (!used_.count(key))
        throw Error(Errc::config,
                    "config: unknown key '" + key + "' in section [" + name_ + "]");
  }

 private:
  std::string name_;
  std::map<std::string, std::string>& entries_;
  std::set<std::string> used_;
};

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  SectionMap sections = parse_sections(text);
  const std::set<std::string> known = {"",        "field", "thermo",  "region_a", "region_b",
                                       "sim",     "run",   "sampler", "ams",      "observable"};
  for (const auto& [name, entries] : sections)
    if (!known.count(name))
      throw Error(Errc::config, "config: unknown section [" + name + "]");

  ExperimentConfig cfg;
  {
    SectionReader top(sections, "");
    cfg.format_version = static_cast<int>(parse_int(top.get("format_version", "1"),
                                                    "format_version"));
    if (cfg.format_version != 1)
      throw Error(Errc::config, "config: unsupported format_version");
    top.finish();
  }
  {
    SectionReader s(sections, "field");
    cfg.potential = s.require("potential");
    cfg.dimension = static_cast<int>(parse_int(s.get("dimension", "1"), "dimension"));
    cfg.a = parse_double(s.get("a", "1.0"), "a");
    cfg.height = parse_double(s.get("height", "1.0"), "height");
    cfg.stiffness = parse_double(s.get("stiffness", "1.0"), "stiffness");
    cfg.center1 = s.has("center1") ? parse_vec(s.require("center1"), "center1")
                                   : Vec(cfg.dimension, 0.0);
    cfg.center2 = s.has("center2") ? parse_vec(s.require("center2"), "center2")
                                   : Vec(cfg.dimension, 0.0);
    s.finish();
  }
  {
    SectionReader s(sections, "thermo");
    cfg.gamma = parse_double(s.require("gamma"), "gamma");
    cfg.beta = parse_double(s.require("beta"), "beta");
    s.finish();
  }
  {
    SectionReader s(sections, "region_a");
    if (s.require("shape") != "ball")
      throw Error(Errc::config, "config: region shape must be 'ball'");
    cfg.center_a = parse_vec(s.require("center"), "center");
    cfg.radius_a = parse_double(s.require("radius"), "radius");
    s.finish();
  }
  {
    SectionReader s(sections, "region_b");
    if (s.require("shape") != "ball")
      throw Error(Errc::config, "config: region shape must be 'ball'");
    cfg.center_b = parse_vec(s.require("center"), "center");
    cfg.radius_b = parse_double(s.require("radius"), "radius");
    s.finish();
  }
  {
    SectionReader s(sections, "sim");
    cfg.dt = parse_double(s.get("dt", "1e-3"), "dt");
    cfg.scheme = s.get("scheme", "baoab");
    cfg.max_steps = parse_int(s.get("max_steps", "200000000"), "max_steps");
    cfg.crossing_tol = parse_double(s.get("crossing_tol", "1e-10"), "crossing_tol");
    cfg.tol_tangent = parse_double(s.get("tol_tangent", "1e-10"), "tol_tangent");
    s.finish();
  }
  {
    SectionReader s(sections, "sampler");
    cfg.sampler_method = s.get("method", "direct_sphere");
    cfg.n_burnin = static_cast<int>(parse_int(s.get("n_burnin", "256"), "n_burnin"));
    cfg.proposal_scale = parse_double(s.get("proposal_scale", "0.3"), "proposal_scale");
    cfg.n_thin = static_cast<int>(parse_int(s.get("n_thin", "16"), "n_thin"));
    s.finish();
  }
  {
    SectionReader s(sections, "run");
    cfg.seed = static_cast<std::uint64_t>(parse_int(s.get("seed", "7012"), "seed"));
    cfg.n_samples =
        static_cast<std::uint64_t>(parse_int(s.get("n_samples", "5000"), "n_samples"));
    cfg.n_events =
        static_cast<std::uint64_t>(parse_int(s.get("n_events", "100000"), "n_events"));
    cfg.threads = static_cast<int>(parse_int(s.get("threads", "1"), "threads"));
    cfg.out_dir = s.get("out_dir", "out");
    cfg.estimators = s.get("estimators", "hill,decomposed,direct");
    s.finish();
  }
  {
    SectionReader s(sections, "ams");
    cfg.n_replicas = static_cast<int>(parse_int(s.get("n_replicas", "128"), "n_replicas"));
    cfg.kill_count = static_cast<int>(parse_int(s.get("kill_count", "8"), "kill_count"));
    cfg.repeats = static_cast<int>(parse_int(s.get("repeats", "4"), "repeats"));
    if (cfg.repeats < 1) throw Error(Errc::config, "config: ams repeats must be >= 1");
    cfg.level_b = parse_double(s.get("level_b", "0.7"), "level_b");
    cfg.xi = s.get("xi", "q0");
    s.finish();
  }
  {
    SectionReader s(sections, "observable");
    cfg.observable = s.get("kind", "none");
    cfg.obs_threshold = parse_double(s.get("threshold", "1.0"), "threshold");
    s.finish();
  }

  // eager validation of cross-field invariants (disjointness included)
  cfg.make_field();
  cfg.make_pair();
  cfg.make_thermo().validate();
  cfg.make_sim_params().validate();
  cfg.make_sampler_params();
  cfg.make_observable();
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config, "config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void write_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::config, "config: cannot write " + path);
  out << cfg.serialize();
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream os;
  os.precision(17);
  os << "format_version = " << format_version << "\n\n";
  os << "[field]\n";
  os << "potential = " << potential << "\n";
  os << "dimension = " << dimension << "\n";
  os << "a = " << a << "\n";
  os << "height = " << height << "\n";
  os << "stiffness = " << stiffness << "\n";
  os << "center1 = " << format_vec(center1) << "\n";
  os << "center2 = " << format_vec(center2) << "\n\n";
  os << "[thermo]\n";
  os << "gamma = " << gamma << "\n";
  os << "beta = " << beta << "\n\n";
  os << "[region_a]\n";
  os << "shape = ball\n";
  os << "center = " << format_vec(center_a) << "\n";
  os << "radius = " << radius_a << "\n\n";
  os << "[region_b]\n";
  os << "shape = ball\n";
  os << "center = " << format_vec(center_b) << "\n";
  os << "radius = " << radius_b << "\n\n";
  os << "[sim]\n";
  os << "dt = " << dt << "\n";
  os << "scheme = " << scheme << "\n";
  os << "max_steps = " << max_steps << "\n";
  os << "crossing_tol = " << crossing_tol << "\n";
  os << "tol_tangent = " << tol_tangent << "\n\n";
  os << "[sampler]\n";
  os << "method = " << sampler_method << "\n";
  os << "n_burnin = " << n_burnin << "\n";
  os << "proposal_scale = " << proposal_scale << "\n";
  os << "n_thin = " << n_thin << "\n\n";
  os << "[run]\n";
  os << "seed = " << seed << "\n";
  os << "n_samples = " << n_samples << "\n";
  os << "n_events = " << n_events << "\n";
  os << "threads = " << threads << "\n";
  os << "out_dir = " << out_dir << "\n";
  os << "estimators = " << estimators << "\n\n";
  os << "[ams]\n";
  os << "n_replicas = " << n_replicas << "\n";
  os << "kill_count = " << kill_count << "\n";
  os << "repeats = " << repeats << "\n";
  os << "level_b = " << level_b << "\n";
  os << "xi = " << xi << "\n\n";
  os << "[observable]\n";
  os << "kind = " << observable << "\n";
  os << "threshold = " << obs_threshold << "\n";
  return os.str();
}

std::uint64_t ExperimentConfig::hash() const {
  // FNV-1a over the canonical serialization; stable across platforms. The
  // hash identifies the experiment, so execution-only fields are normalized
  // away (results do not depend on thread count or output location).
  ExperimentConfig canonical = *this;
  canonical.threads = 0;
  canonical.out_dir.clear();
  const std::string s = canonical.serialize();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

ForceField ExperimentConfig::make_field() const {
  if (potential == "double_well_1d")
    return ForceField::conservative(PotentialSpec::double_well_1d(a, height), dimension);
  if (potential == "radial_double_well")
    return ForceField::conservative(PotentialSpec::radial_double_well(center1, center2, stiffness),
                                    dimension);
  if (potential == "harmonic")
    return ForceField::conservative(PotentialSpec::harmonic(center1, stiffness), dimension);
  throw Error(Errc::config, "config: unknown potential '" + potential + "'");
}

MetastablePair ExperimentConfig::make_pair() const {
  return MetastablePair(LevelSetRegion::ball(center_a, radius_a, SetLabel::A),
                        LevelSetRegion::ball(center_b, radius_b, SetLabel::B));
}

ThermoParams ExperimentConfig::make_thermo() const { return {gamma, beta}; }

SimParams ExperimentConfig::make_sim_params() const {
  SimParams p;
  p.thermo = make_thermo();
  p.dt = dt;
  if (scheme == "baoab")
    p.scheme = Scheme::baoab;
  else if (scheme == "euler_maruyama")
    p.scheme = Scheme::euler_maruyama;
  else
    throw Error(Errc::config, "config: unknown scheme '" + scheme + "'");
  p.max_steps = max_steps;
  p.crossing_tol = crossing_tol;
  p.tol_tangent = tol_tangent;
  return p;
}

SurfaceSamplerParams ExperimentConfig::make_sampler_params() const {
  SurfaceSamplerParams p;
  if (sampler_method == "direct_sphere")
    p.method = SurfaceMethod::direct_sphere;
  else if (sampler_method == "metropolis_projection")
    p.method = SurfaceMethod::metropolis_projection;
  else
    throw Error(Errc::config, "config: unknown sampler method '" + sampler_method + "'");
  p.n_burnin = n_burnin;
  p.proposal_scale = proposal_scale;
  p.n_thin = n_thin;
  return p;
}

Observable ExperimentConfig::make_observable() const {
  if (observable == "none") return nullptr;
  if (observable == "speed_indicator") {
    const double thr = obs_threshold;
    return [thr](const Vec&, const Vec& p) { return norm(p) > thr ? 1.0 : 0.0; };
  }
  throw Error(Errc::config, "config: unknown observable '" + observable + "'");
}

AmsParams ExperimentConfig::make_ams_params() const {
  AmsParams p;
  p.n_replicas = n_replicas;
  p.kill_count = kill_count;
  p.level_B = level_b;
  if (xi == "q0") {
    p.reaction_coordinate = [](const Vec& q) { return q[0]; };
  } else if (xi == "minus_distance_to_b") {
    const Vec cb = center_b;
    p.reaction_coordinate = [cb](const Vec& q) { return -norm(q - cb); };
  } else {
    throw Error(Errc::config, "config: unknown reaction coordinate '" + xi + "'");
  }
  p.validate();
  return p;
}

BoundaryMeasureSpec ExperimentConfig::boundary_spec(SetLabel set, BoundarySide side) const {
  const auto pair = make_pair();
  return {pair.region(set), make_field(), beta, side};
}

}  // namespace hillgate
