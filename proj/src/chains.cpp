#include "hillgate/chains.hpp"

#include <ostream>

namespace hillgate {

ReactiveIndexing reactive_indexing(const std::vector<SetLabel>& labels) {
  ReactiveIndexing idx;
  const std::size_t n = labels.size();
  std::size_t pos = 0;
  // first visit to A
  while (pos < n && labels[pos] != SetLabel::A) ++pos;
  bool looking_for_B = true;
  if (pos < n) idx.eta_re_A.push_back(pos);
  while (pos < n) {
    const SetLabel want = looking_for_B ? SetLabel::B : SetLabel::A;
    while (pos < n && labels[pos] != want) ++pos;
    if (pos >= n) break;
    (looking_for_B ? idx.eta_re_B : idx.eta_re_A).push_back(pos);
    looking_for_B = !looking_for_B;
  }
  for (std::size_t k = 0; k < idx.eta_re_B.size(); ++k)
    idx.eta_ex_A.push_back(idx.eta_re_B[k] - 1);
  for (std::size_t k = 1; k < idx.eta_re_A.size(); ++k)
    idx.eta_ex_B.push_back(idx.eta_re_A[k] - 1);
  return idx;
}

namespace {

BoundaryChain filter_side(const BoundaryChain& chain, BoundarySide side) {
  BoundaryChain out;
  out.counters = chain.counters;
  const bool has_g = chain.has_accumulators();
  double carry = 0.0;
  for (std::size_t i = 0; i < chain.events.size(); ++i) {
    if (has_g) carry += chain.accumulators[i];
    if (chain.events[i].side != side) continue;
    out.events.push_back(chain.events[i]);
    if (has_g) {
      out.accumulators.push_back(carry);
      carry = 0.0;
    }
  }
  return out;
}

}  // namespace

BoundaryChain entry_subchain(const BoundaryChain& chain) {
  return filter_side(chain, BoundarySide::gamma_minus);
}

BoundaryChain exit_subchain(const BoundaryChain& chain) {
  return filter_side(chain, BoundarySide::gamma_plus);
}

std::vector<SetLabel> labels_of(const BoundaryChain& chain) {
  std::vector<SetLabel> labels;
  labels.reserve(chain.events.size());
  for (const auto& e : chain.events) labels.push_back(e.set_label);
  return labels;
}

std::vector<TransitionSample> transition_samples(const BoundaryChain& entry_chain) {
  const auto idx = reactive_indexing(labels_of(entry_chain));
  const bool has_g = entry_chain.has_accumulators();
  std::vector<TransitionSample> out;
  const std::size_t k_max = std::min(idx.eta_re_A.size(), idx.eta_re_B.size());
  for (std::size_t k = 0; k < k_max; ++k) {
    TransitionSample ts;
    const std::size_t ia = idx.eta_re_A[k];
    const std::size_t ib = idx.eta_re_B[k];
    ts.duration = entry_chain.events[ib].time - entry_chain.events[ia].time;
    if (has_g) {
      ts.has_g = true;
      for (std::size_t i = ia + 1; i <= ib; ++i) ts.g_integral += entry_chain.accumulators[i];
    }
    out.push_back(ts);
  }
  return out;
}

namespace {

std::vector<CrossingEvent> take_indices(const BoundaryChain& chain,
                                        const std::vector<std::size_t>& indices) {
  std::vector<CrossingEvent> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(chain.events[i]);
  return out;
}

}  // namespace

std::vector<CrossingEvent> empirical_reactive_entrance(const BoundaryChain& entry_chain,
                                                       SetLabel target) {
  const auto idx = reactive_indexing(labels_of(entry_chain));
  return take_indices(entry_chain, target == SetLabel::A ? idx.eta_re_A : idx.eta_re_B);
}

std::vector<CrossingEvent> empirical_reactive_exit(const BoundaryChain& entry_chain,
                                                   SetLabel target) {
  const auto idx = reactive_indexing(labels_of(entry_chain));
  return take_indices(entry_chain, target == SetLabel::A ? idx.eta_ex_A : idx.eta_ex_B);
}

void write_chain_csv(std::ostream& os, const BoundaryChain& chain) {
  const std::size_t d = chain.events.empty() ? 0 : chain.events.front().x.q.size();
  os << "index,time,side,set";
  for (std::size_t i = 0; i < d; ++i) os << ",q" << i;
  for (std::size_t i = 0; i < d; ++i) os << ",p" << i;
  os << ",g_segment\n";
  os.precision(17);
  for (std::size_t k = 0; k < chain.events.size(); ++k) {
    const auto& e = chain.events[k];
    os << k << ',' << e.time << ',' << to_string(e.side) << ',' << to_string(e.set_label);
    for (double v : e.x.q) os << ',' << v;
    for (double v : e.x.p) os << ',' << v;
    os << ',' << (chain.has_accumulators() ? chain.accumulators[k] : 0.0) << '\n';
  }
}

}  // namespace hillgate
