#include "hillgate/harris_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <tuple>

#include <json.hpp>

#include "hillgate/errors.hpp"

namespace hillgate::oracle {

namespace {

std::vector<int> complement(const std::vector<int>& C, int n) {
  std::vector<char> in(n, 0);
  for (int c : C) {
    if (c < 0 || c >= n) throw_invalid("state subset index out of range");
    in[c] = 1;
  }
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (!in[i]) out.push_back(i);
  return out;
}

MatrixXd submatrix(const MatrixXd& P, const std::vector<int>& rows,
                   const std::vector<int>& cols) {
  MatrixXd S(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) S(i, j) = P(rows[i], cols[j]);
  return S;
}

std::vector<int> states_of(const FiniteChain& chain, SetLabel s) {
  std::vector<int> out;
  for (int i = 0; i < chain.size(); ++i)
    if (chain.partition[i] == s) out.push_back(i);
  return out;
}

bool reaches_all(const MatrixXd& P, bool transpose) {
  const int n = static_cast<int>(P.rows());
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v = 0; v < n; ++v) {
      const double w = transpose ? P(v, u) : P(u, v);
      if (w > 0.0 && !seen[v]) {
        seen[v] = 1;
        ++count;
        q.push(v);
      }
    }
  }
  return count == n;
}

}  // namespace

bool is_irreducible(const MatrixXd& P) { return reaches_all(P, false) && reaches_all(P, true); }

void FiniteChain::validate_kernel() const {
  const int n = size();
  if (n < 1) throw_invalid("FiniteChain: empty chain");
  if (P.cols() != n) throw_invalid("FiniteChain: P must be square");
  if (static_cast<int>(partition.size()) != n)
    throw_invalid("FiniteChain: partition size mismatch");
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (P(i, j) < -1e-15) throw_invalid("FiniteChain: negative entry");
      row += P(i, j);
    }
    if (std::abs(row - 1.0) > 1e-12)
      throw_invalid("FiniteChain: row " + std::to_string(i) + " does not sum to 1");
  }
  if (!is_irreducible(P)) throw_invalid("FiniteChain: chain is reducible");
}

void FiniteChain::validate() const {
  validate_kernel();
  if (size() < 2) throw_invalid("FiniteChain: need at least 2 states");
  bool has_a = false, has_b = false;
  for (auto s : partition) (s == SetLabel::A ? has_a : has_b) = true;
  if (!has_a || !has_b) throw_invalid("FiniteChain: both A and B must be nonempty");
}

VectorXd stationary(const FiniteChain& chain) {
  chain.validate_kernel();
  const int n = chain.size();
  // (P^T - I) pi = 0 with the normalization row appended
  MatrixXd A(n + 1, n);
  A.topRows(n) = chain.P.transpose() - MatrixXd::Identity(n, n);
  A.row(n).setOnes();
  VectorXd b = VectorXd::Zero(n + 1);
  b(n) = 1.0;
  VectorXd pi = A.colPivHouseholderQr().solve(b);
  const double res = ((chain.P.transpose() * pi - pi).lpNorm<Eigen::Infinity>());
  if (res > 1e-12 || std::abs(pi.sum() - 1.0) > 1e-12)
    throw_numerical("stationary: residual exceeds 1e-12");
  return pi;
}

ReactiveDistributions reactive_distributions(const FiniteChain& chain, const VectorXd& pi) {
  const int n = chain.size();
  ReactiveDistributions rd;
  rd.nu_re_A = VectorXd::Zero(n);
  rd.nu_ex_A = VectorXd::Zero(n);
  rd.nu_re_B = VectorXd::Zero(n);
  rd.nu_ex_B = VectorXd::Zero(n);
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      const double flux = pi(x) * chain.P(x, y);
      if (chain.partition[x] == SetLabel::B && chain.partition[y] == SetLabel::A) {
        rd.nu_re_A(y) += flux;
        rd.nu_ex_B(x) += flux;
        rd.cap_BA += flux;
      } else if (chain.partition[x] == SetLabel::A && chain.partition[y] == SetLabel::B) {
        rd.nu_re_B(y) += flux;
        rd.nu_ex_A(x) += flux;
        rd.cap_AB += flux;
      }
    }
  }
  if (rd.cap_AB <= 0.0 || rd.cap_BA <= 0.0)
    throw_invalid("reactive_distributions: no A<->B flux");
  rd.nu_re_A /= rd.cap_BA;
  rd.nu_ex_B /= rd.cap_BA;
  rd.nu_re_B /= rd.cap_AB;
  rd.nu_ex_A /= rd.cap_AB;
  return rd;
}

double hill_lhs(const FiniteChain& chain, const VectorXd& g) {
  chain.validate();
  const auto A = states_of(chain, SetLabel::A);
  const MatrixXd PAA = submatrix(chain.P, A, A);
  VectorXd gA(A.size());
  for (std::size_t i = 0; i < A.size(); ++i) gA(i) = g(A[i]);
  const MatrixXd M = MatrixXd::Identity(A.size(), A.size()) - PAA;
  const VectorXd fA = M.colPivHouseholderQr().solve(gA);
  if ((M * fA - gA).lpNorm<Eigen::Infinity>() > 1e-9 * (1.0 + gA.lpNorm<Eigen::Infinity>()))
    throw_numerical("hill_lhs: singular Dirichlet system");
  const VectorXd pi = stationary(chain);
  const auto rd = reactive_distributions(chain, pi);
  double lhs = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) lhs += rd.nu_re_A(A[i]) * fA(i);
  return lhs;
}

double hill_rhs(const FiniteChain& chain, const VectorXd& pi, const VectorXd& g) {
  double pi_A = 0.0, num = 0.0, flux = 0.0;
  const int n = chain.size();
  for (int y = 0; y < n; ++y) {
    if (chain.partition[y] != SetLabel::A) continue;
    pi_A += pi(y);
    num += pi(y) * g(y);
    for (int z = 0; z < n; ++z)
      if (chain.partition[z] == SetLabel::B) flux += pi(y) * chain.P(y, z);
  }
  if (flux <= 0.0) throw_invalid("hill_rhs: zero flux from A to B");
  return (num / pi_A) / (flux / pi_A);
}

RepresentationCheck representation_check(const FiniteChain& chain, const VectorXd& pi,
                                         const std::vector<int>& C, const VectorXd& g) {
  chain.validate();
  const int n = chain.size();
  if (C.empty()) throw_invalid("representation_check: C must be nonempty");
  const auto Cc = complement(C, n);

  // h(x) = E_x[sum_{n=0}^{tau_C - 1} g(Y_n)] for x outside C
  VectorXd h = VectorXd::Zero(n);
  if (!Cc.empty()) {
    const MatrixXd M =
        MatrixXd::Identity(Cc.size(), Cc.size()) - submatrix(chain.P, Cc, Cc);
    VectorXd gc(Cc.size());
    for (std::size_t i = 0; i < Cc.size(); ++i) gc(i) = g(Cc[i]);
    const VectorXd hc = M.colPivHouseholderQr().solve(gc);
    for (std::size_t i = 0; i < Cc.size(); ++i) h(Cc[i]) = hc(i);
  }

  double pi_C = 0.0;
  for (int c : C) pi_C += pi(c);
  if (pi_C <= 0.0) throw_invalid("representation_check: pi(C) = 0");

  RepresentationCheck rc;
  for (int y : C) {
    double val = g(y);
    for (int x = 0; x < n; ++x) val += chain.P(y, x) * h(x);
    rc.lhs += (pi(y) / pi_C) * val;
  }
  rc.rhs = pi.dot(g) / pi_C;
  return rc;
}

FiniteChain pair_chain(const FiniteChain& chain) {
  const int n = chain.size();
  FiniteChain out;
  out.P = MatrixXd::Zero(n * n, n * n);
  out.partition.resize(n * n);
  out.states.resize(n * n);
  auto id = [n](int y0, int y1) { return y0 * n + y1; };
  for (int y0 = 0; y0 < n; ++y0) {
    for (int y1 = 0; y1 < n; ++y1) {
      for (int y2 = 0; y2 < n; ++y2) out.P(id(y0, y1), id(y1, y2)) = chain.P(y1, y2);
      out.partition[id(y0, y1)] = chain.partition[y1];
      out.states[id(y0, y1)] =
          std::to_string(y0) + "|" + std::to_string(y1);
    }
  }
  return out;
}

FiniteChain trace_chain(const FiniteChain& chain, const std::vector<int>& C) {
  chain.validate();
  if (C.empty()) throw_invalid("trace_chain: C must be nonempty");
  const auto Cc = complement(C, chain.size());
  const MatrixXd PCC = submatrix(chain.P, C, C);
  MatrixXd Q = PCC;
  if (!Cc.empty()) {
    const MatrixXd M =
        MatrixXd::Identity(Cc.size(), Cc.size()) - submatrix(chain.P, Cc, Cc);
    const MatrixXd X = M.colPivHouseholderQr().solve(submatrix(chain.P, Cc, C));
    Q += submatrix(chain.P, C, Cc) * X;
  }
  FiniteChain out;
  out.P = Q;
  out.partition.resize(C.size());
  out.states.resize(C.size());
  for (std::size_t i = 0; i < C.size(); ++i) {
    out.partition[i] = chain.partition[C[i]];
    out.states[i] = chain.states.empty() ? std::to_string(C[i]) : chain.states[C[i]];
  }
  return out;
}

RenewalPairCheck renewal_pair_check(const FiniteChain& chain, const std::vector<int>& g,
                                    double tail_tol, int max_horizon) {
  chain.validate();
  const int n = chain.size();
  if (static_cast<int>(g.size()) != n) throw_invalid("renewal_pair_check: g size mismatch");
  for (int v : g)
    if (v < 0) throw_invalid("renewal_pair_check: scores must be nonnegative integers");

  const VectorXd pi = stationary(chain);
  const auto rd = reactive_distributions(chain, pi);

  // Two-stage forward propagation. Stage 1 follows the first excursion from
  // y0 ~ nu_re_A: z accumulates g from y0 until the first B-visit (whose g is
  // not counted), then runs to the next A-entrance y1, producing the joint
  // mass m1(z, y1). Stage 2 evolves all of that mass together through the
  // second excursion, z' accumulating from y1 to its B-visit. Every stage-2
  // path gets the same step budget, so the finite-horizon truncation of the
  // conditional law of z' given y1 is identical across conditioning scores.
  struct Key {
    int phase, state, y1, z, z2;
    bool operator<(const Key& o) const {
      if (phase != o.phase) return phase < o.phase;
      if (state != o.state) return state < o.state;
      if (y1 != o.y1) return y1 < o.y1;
      if (z != o.z) return z < o.z;
      return z2 < o.z2;
    }
  };
  std::map<Key, double> mass;
  std::map<Key, double> stage2_seed;
  std::map<std::tuple<int, int, int>, double> joint;
  double pruned = 0.0;

  for (int y0 = 0; y0 < n; ++y0)
    if (rd.nu_re_A(y0) > 0.0) mass[{0, y0, -1, g[y0], 0}] = rd.nu_re_A(y0);

  double alive = 1.0;
  int steps = 0;
  while (alive > tail_tol && steps < max_horizon) {
    std::map<Key, double> next;
    for (const auto& [k, m] : mass) {
      for (int s2 = 0; s2 < n; ++s2) {
        const double w = m * chain.P(k.state, s2);
        if (w == 0.0) continue;
        if (w < 1e-24) {
          pruned += w;
          continue;
        }
        Key nk = k;
        nk.state = s2;
        if (k.phase == 0) {
          if (chain.partition[s2] == SetLabel::B)
            nk.phase = 1;  // z frozen
          else
            nk.z = k.z + g[s2];
          next[nk] += w;
        } else {
          if (chain.partition[s2] == SetLabel::A) {
            nk.phase = 2;
            nk.y1 = s2;
            nk.z2 = g[s2];
            stage2_seed[nk] += w;
          } else {
            next[nk] += w;
          }
        }
      }
    }
    alive = 0.0;
    for (const auto& [k, m] : next) alive += m;
    mass.swap(next);
    ++steps;
  }
  const double stage1_tail = alive;

  mass = std::move(stage2_seed);
  alive = 1.0;
  steps = 0;
  while (alive > tail_tol && steps < max_horizon) {
    std::map<Key, double> next;
    for (const auto& [k, m] : mass) {
      for (int s2 = 0; s2 < n; ++s2) {
        const double w = m * chain.P(k.state, s2);
        if (w == 0.0) continue;
        if (w < 1e-24) {
          pruned += w;
          continue;
        }
        Key nk = k;
        nk.state = s2;
        if (chain.partition[s2] == SetLabel::B) {
          joint[{k.y1, k.z, k.z2}] += w;
        } else {
          nk.z2 = k.z2 + g[s2];
          next[nk] += w;
        }
      }
    }
    alive = 0.0;
    for (const auto& [k, m] : next) alive += m;
    mass.swap(next);
    ++steps;
  }

  RenewalPairCheck out;
  out.tail_mass = stage1_tail + alive + pruned;
  out.conclusive = out.tail_mass <= tail_tol * 10.0;
  if (!out.conclusive) return out;

  double total = 0.0, z_sum = 0.0;
  for (const auto& [key, m] : joint) {
    total += m;
    z_sum += std::get<1>(key) * m;
  }
  out.mean_score = z_sum / total;

  // Conditional laws of z' given (y1, z); factorization means they do not
  // depend on z. Compare every pair of conditioning scores by total variation.
  for (int y1 = 0; y1 < n; ++y1) {
    std::map<int, std::map<int, double>> by_z;  // z -> (z' -> mass)
    std::map<int, double> z_mass;
    for (const auto& [key, m] : joint) {
      if (std::get<0>(key) != y1) continue;
      by_z[std::get<1>(key)][std::get<2>(key)] += m;
      z_mass[std::get<1>(key)] += m;
    }
    std::vector<int> zs;
    for (const auto& [z, m] : z_mass)
      if (m > 1e-6) zs.push_back(z);
    for (std::size_t a = 0; a < zs.size(); ++a) {
      for (std::size_t b = a + 1; b < zs.size(); ++b) {
        std::map<int, double> diff;
        for (const auto& [z2, m] : by_z[zs[a]]) diff[z2] += m / z_mass[zs[a]];
        for (const auto& [z2, m] : by_z[zs[b]]) diff[z2] -= m / z_mass[zs[b]];
        double tv = 0.0;
        for (const auto& [z2, d] : diff) tv += std::abs(d);
        out.max_total_variation = std::max(out.max_total_variation, 0.5 * tv);
      }
    }
  }
  out.factorized = out.max_total_variation <= 1e-10;
  return out;
}

FiniteChain random_chain(int n_states, RngStream& rng) {
  if (n_states < 2) throw_invalid("random_chain: need >= 2 states");
  FiniteChain c;
  c.P.resize(n_states, n_states);
  c.partition.resize(n_states);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (int i = 0; i < n_states; ++i) {
      double row = 0.0;
      for (int j = 0; j < n_states; ++j) {
        const double e = -std::log(rng.uniform_pos());  // Dirichlet(1,..,1) row
        c.P(i, j) = e;
        row += e;
      }
      for (int j = 0; j < n_states; ++j) c.P(i, j) /= row;
    }
    const int n_a = 1 + static_cast<int>(rng.uniform_index(n_states - 1));
    std::vector<int> perm(n_states);
    for (int i = 0; i < n_states; ++i) perm[i] = i;
    for (int i = n_states - 1; i > 0; --i)
      std::swap(perm[i], perm[rng.uniform_index(i + 1)]);
    for (int i = 0; i < n_states; ++i)
      c.partition[perm[i]] = i < n_a ? SetLabel::A : SetLabel::B;
    if (is_irreducible(c.P)) return c;
  }
  throw_numerical("random_chain: failed to draw an irreducible chain");
}

std::vector<int> simulate(const FiniteChain& chain, int start_state, std::size_t n_steps,
                          RngStream& rng) {
  const int n = chain.size();
  std::vector<int> path;
  path.reserve(n_steps + 1);
  int s = start_state;
  path.push_back(s);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double u = rng.uniform();
    double acc = 0.0;
    int next = n - 1;
    for (int j = 0; j < n; ++j) {
      acc += chain.P(s, j);
      if (u < acc) {
        next = j;
        break;
      }
    }
    s = next;
    path.push_back(s);
  }
  return path;
}

FiniteChain chain_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  FiniteChain c;
  const auto& rows = j.at("P");
  const int n = static_cast<int>(rows.size());
  c.P.resize(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n) throw_invalid("chain_from_json: ragged matrix");
    for (int k = 0; k < n; ++k) c.P(i, k) = rows[i][k].get<double>();
  }
  for (const auto& s : j.at("partition"))
    c.partition.push_back(s.get<std::string>() == "A" ? SetLabel::A : SetLabel::B);
  if (j.contains("states"))
    for (const auto& s : j.at("states")) c.states.push_back(s.get<std::string>());
  c.validate();
  return c;
}

std::string chain_to_json(const FiniteChain& chain) {
  nlohmann::json j;
  const int n = chain.size();
  for (int i = 0; i < n; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < n; ++k) row.push_back(chain.P(i, k));
    j["P"].push_back(row);
  }
  for (auto s : chain.partition) j["partition"].push_back(to_string(s));
  if (!chain.states.empty()) j["states"] = chain.states;
  return j.dump(2);
}

}  // namespace hillgate::oracle
