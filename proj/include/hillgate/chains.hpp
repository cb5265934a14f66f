#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "hillgate/integrator.hpp"

namespace hillgate {

// Return/exit indices of the alternating visits to the two label classes.
// eta_re_X[k] is the index of the k-th entrance of the label sequence into X
// coming from the other class (counted from the first visit to A), and
// eta_ex_A[k] = eta_re_B[k] - 1, eta_ex_B[k] = eta_re_A[k+1] - 1.
struct ReactiveIndexing {
  std::vector<std::size_t> eta_re_A;
  std::vector<std::size_t> eta_re_B;
  std::vector<std::size_t> eta_ex_A;
  std::vector<std::size_t> eta_ex_B;
};

ReactiveIndexing reactive_indexing(const std::vector<SetLabel>& labels);

// Keeps the gamma_minus events (the trace of the crossing chain on Gamma^-);
// per-event accumulators are merged across the dropped events.
BoundaryChain entry_subchain(const BoundaryChain& chain);

// Same for gamma_plus (the exit chain Y^+).
BoundaryChain exit_subchain(const BoundaryChain& chain);

std::vector<SetLabel> labels_of(const BoundaryChain& chain);

struct TransitionSample {
  double duration = 0.0;
  double g_integral = 0.0;
  bool has_g = false;
};

// One sample per completed A->B excursion of an entry chain: the time (and
// accumulated observable) between the k-th reactive entrance into A and the
// following entrance into B.
std::vector<TransitionSample> transition_samples(const BoundaryChain& entry_chain);

// Events of the entry chain located at the reactive entrance (first entry
// into `target` after visiting the other set) or reactive exit indices; the
// empirical measures put uniform weight on the returned points.
std::vector<CrossingEvent> empirical_reactive_entrance(const BoundaryChain& entry_chain,
                                                       SetLabel target);
std::vector<CrossingEvent> empirical_reactive_exit(const BoundaryChain& entry_chain,
                                                   SetLabel target);

// CSV with columns: index,time,side,set,q...,p...,g_segment
void write_chain_csv(std::ostream& os, const BoundaryChain& chain);

}  // namespace hillgate
