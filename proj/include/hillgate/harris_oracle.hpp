#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hillgate/geometry.hpp"
#include "hillgate/rng.hpp"

namespace hillgate::oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// An explicit row-stochastic chain with an A/B state partition. Validation
// enforces nonnegative entries, unit row sums (1e-12), nonempty A and B, and
// irreducibility (strong connectivity of the positive-entry graph).
struct FiniteChain {
  MatrixXd P;
  std::vector<SetLabel> partition;
  std::vector<std::string> states;  // optional display names

  int size() const { return static_cast<int>(P.rows()); }
  // stochasticity + irreducibility only (derived chains, e.g. traces of the
  // pair chain, may live entirely inside one partition class)
  void validate_kernel() const;
  void validate() const;
};

bool is_irreducible(const MatrixXd& P);

struct FiniteMeasure {
  VectorXd weights;
  bool normalized = true;
};

// Solves pi P = pi, pi . 1 = 1; residual <= 1e-12 or a numerical error.
VectorXd stationary(const FiniteChain& chain);

struct ReactiveDistributions {
  VectorXd nu_re_A, nu_ex_A, nu_re_B, nu_ex_B;  // full-length, zero off-set
  double cap_AB = 0.0;  // Pr_pi(Y0 in A, Y1 in B)
  double cap_BA = 0.0;  // Pr_pi(Y0 in B, Y1 in A)
};

// nu_re_A(y) ~ sum_{x in B} pi(x) P(x,y) on A; nu_ex_A(y) ~ pi(y) P(y, B) on A;
// same with roles swapped for B. The two normalizations (capacities) agree.
ReactiveDistributions reactive_distributions(const FiniteChain& chain, const VectorXd& pi);

// E_{nu_re_A}[ sum_{n=0}^{eta_re_B - 1} g(Y_n) ] through the Dirichlet system
// (I - P_AA) f_A = g_A, f = 0 on B.
double hill_lhs(const FiniteChain& chain, const VectorXd& g);

// pi_A(g) / Pr_{pi_A}(Y_1 in B), computed directly.
double hill_rhs(const FiniteChain& chain, const VectorXd& pi, const VectorXd& g);

// lhs = E_{pi_C}[ sum_{n=0}^{eta_1 - 1} g(Y_n) ] with eta_1 the first return
// time to C; rhs = pi(g) / pi(C).
struct RepresentationCheck {
  double lhs = 0.0;
  double rhs = 0.0;
};
RepresentationCheck representation_check(const FiniteChain& chain, const VectorXd& pi,
                                         const std::vector<int>& C, const VectorXd& g);

// Pair chain on S x S with kernel Pbar((y0,y1),(y1,y2)) = P(y1,y2); states are
// labeled by the second coordinate's partition class.
FiniteChain pair_chain(const FiniteChain& chain);

// Trace on C via first-passage decomposition
// Q = P_CC + P_CC' (I - P_C'C')^{-1} P_C'C.
FiniteChain trace_chain(const FiniteChain& chain, const std::vector<int>& C);

// Finite realization of the Markov-renewal pair (entrance point, excursion
// score): assembles the stationary joint law of (Z_k, Y_{k+1}, Z_{k+1}) by
// forward propagation over (phase, state, scores) with an adaptive horizon,
// then checks that the conditional law of Z_{k+1} given Y_{k+1} does not
// depend on Z_k. Scores must be small nonnegative integers.
struct RenewalPairCheck {
  bool conclusive = false;
  bool factorized = false;
  double max_total_variation = 0.0;
  double tail_mass = 0.0;
  double mean_score = 0.0;  // stationary mean of Z (for MC comparisons)
};
RenewalPairCheck renewal_pair_check(const FiniteChain& chain, const std::vector<int>& g,
                                    double tail_tol = 1e-12, int max_horizon = 4000);

// Dirichlet(1,...,1) rows, resampled until irreducible, with a random
// nonempty/nonfull A partition.
FiniteChain random_chain(int n_states, RngStream& rng);

// Simulates the chain as a state sequence (used by Monte Carlo cross-checks).
std::vector<int> simulate(const FiniteChain& chain, int start_state, std::size_t n_steps,
                          RngStream& rng);

// JSON (de)serialization for regression fixtures:
// {"P": [[...], ...], "partition": ["A","B",...], "states": [...]}
FiniteChain chain_from_json(const std::string& text);
std::string chain_to_json(const FiniteChain& chain);

}  // namespace hillgate::oracle
