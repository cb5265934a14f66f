#include <doctest.h>

#include "hillgate/chains.hpp"
#include "hillgate/rng.hpp"

using namespace hillgate;

namespace {

BoundaryChain make_chain(const std::vector<SetLabel>& labels, const std::vector<double>& times,
                         BoundarySide side = BoundarySide::gamma_minus,
                         std::vector<double> accumulators = {}) {
  BoundaryChain c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    CrossingEvent e;
    e.x.q = {0.0};
    e.x.p = {side == BoundarySide::gamma_minus ? -1.0 : 1.0};
    e.time = times[i];
    e.side = side;
    e.set_label = labels[i];
    c.events.push_back(e);
  }
  c.accumulators = std::move(accumulators);
  return c;
}

// O(n^2) rescanning oracle for the recursive return-time definition.
ReactiveIndexing naive_indexing(const std::vector<SetLabel>& labels) {
  ReactiveIndexing idx;
  const std::size_t n = labels.size();
  auto find_from = [&](std::size_t start, SetLabel want) -> long long {
    for (std::size_t i = start; i < n; ++i)
      if (labels[i] == want) return static_cast<long long>(i);
    return -1;
  };
  long long a = find_from(0, SetLabel::A);
  if (a < 0) return idx;
  idx.eta_re_A.push_back(a);
  while (true) {
    const long long b = find_from(idx.eta_re_A.back(), SetLabel::B);
    if (b < 0) break;
    idx.eta_re_B.push_back(b);
    const long long a2 = find_from(idx.eta_re_B.back(), SetLabel::A);
    if (a2 < 0) break;
    idx.eta_re_A.push_back(a2);
  }
  for (std::size_t k = 0; k < idx.eta_re_B.size(); ++k)
    idx.eta_ex_A.push_back(idx.eta_re_B[k] - 1);
  for (std::size_t k = 1; k < idx.eta_re_A.size(); ++k)
    idx.eta_ex_B.push_back(idx.eta_re_A[k] - 1);
  return idx;
}

}  // namespace

TEST_SUITE_BEGIN("chains");

TEST_CASE("reactive indexing examples") {
  using L = SetLabel;
  SUBCASE("B,B,A,A,B,A") {
    const auto idx = reactive_indexing({L::B, L::B, L::A, L::A, L::B, L::A});
    CHECK(idx.eta_re_A == std::vector<std::size_t>{2, 5});
    CHECK(idx.eta_re_B == std::vector<std::size_t>{4});
    CHECK(idx.eta_ex_A == std::vector<std::size_t>{3});
    CHECK(idx.eta_ex_B == std::vector<std::size_t>{4});
  }
  SUBCASE("A,B") {
    const auto idx = reactive_indexing({L::A, L::B});
    CHECK(idx.eta_re_A == std::vector<std::size_t>{0});
    CHECK(idx.eta_re_B == std::vector<std::size_t>{1});
    CHECK(idx.eta_ex_A == std::vector<std::size_t>{0});
    CHECK(idx.eta_ex_B.empty());
  }
  SUBCASE("A,A,A") {
    const auto idx = reactive_indexing({L::A, L::A, L::A});
    CHECK(idx.eta_re_A == std::vector<std::size_t>{0});
    CHECK(idx.eta_re_B.empty());
    CHECK(idx.eta_ex_A.empty());
  }
}

TEST_CASE("reactive indexing: random sequences match the naive oracle and interleave") {
  RngStream rng(99, 0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(40);
    std::vector<SetLabel> labels(n);
    for (auto& l : labels) l = rng.uniform() < 0.5 ? SetLabel::A : SetLabel::B;
    const auto idx = reactive_indexing(labels);
    const auto ref = naive_indexing(labels);
    CHECK(idx.eta_re_A == ref.eta_re_A);
    CHECK(idx.eta_re_B == ref.eta_re_B);
    CHECK(idx.eta_ex_A == ref.eta_ex_A);
    CHECK(idx.eta_ex_B == ref.eta_ex_B);
    // strict interleaving eta_re_A0 < eta_re_B0 < eta_re_A1 < ...
    for (std::size_t k = 0; k < idx.eta_re_B.size(); ++k) {
      CHECK(idx.eta_re_A[k] < idx.eta_re_B[k]);
      if (k + 1 < idx.eta_re_A.size()) CHECK(idx.eta_re_B[k] < idx.eta_re_A[k + 1]);
    }
  }
}

TEST_CASE("entry subchain filters sides and merges accumulators") {
  BoundaryChain c;
  const SetLabel labels[4] = {SetLabel::A, SetLabel::A, SetLabel::B, SetLabel::B};
  const BoundarySide sides[4] = {BoundarySide::gamma_minus, BoundarySide::gamma_plus,
                                 BoundarySide::gamma_minus, BoundarySide::gamma_plus};
  for (int i = 0; i < 4; ++i) {
    CrossingEvent e;
    e.x.q = {0.0};
    e.x.p = {1.0};
    e.time = i + 1.0;
    e.side = sides[i];
    e.set_label = labels[i];
    c.events.push_back(e);
    c.accumulators.push_back(0.5 * (i + 1));
  }
  const auto entries = entry_subchain(c);
  REQUIRE(entries.size() == 2);
  CHECK(entries.events[0].set_label == SetLabel::A);
  CHECK(entries.events[1].set_label == SetLabel::B);
  CHECK(entries.accumulators[0] == doctest::Approx(0.5));
  CHECK(entries.accumulators[1] == doctest::Approx(1.0 + 1.5));
  CHECK(exit_subchain(c).size() == 2);
  CHECK(entry_subchain(BoundaryChain{}).size() == 0);
}

TEST_CASE("transition samples") {
  using L = SetLabel;
  SUBCASE("single A->B transition") {
    const auto chain = make_chain({L::A, L::B}, {1.0, 3.5});
    const auto ts = transition_samples(chain);
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].duration == doctest::Approx(2.5));
  }
  SUBCASE("no completed excursion") {
    CHECK(transition_samples(make_chain({L::B, L::A, L::A}, {0.0, 1.0, 2.0})).empty());
  }
  SUBCASE("durations nonnegative and count matches eta_re_B") {
    RngStream rng(5, 1);
    std::vector<SetLabel> labels;
    std::vector<double> times;
    double t = 0.0;
    for (int i = 0; i < 200; ++i) {
      labels.push_back(rng.uniform() < 0.5 ? L::A : L::B);
      t += rng.uniform(0.01, 1.0);
      times.push_back(t);
    }
    const auto chain = make_chain(labels, times);
    const auto ts = transition_samples(chain);
    const auto idx = reactive_indexing(labels);
    CHECK(ts.size() == idx.eta_re_B.size());
    for (const auto& s : ts) CHECK(s.duration >= 0.0);
  }
}

TEST_CASE("empirical reactive entrance and exit sets") {
  using L = SetLabel;
  const auto chain =
      make_chain({L::B, L::B, L::A, L::A, L::B, L::A}, {0.0, 1.0, 2.0, 3.0, 4.0, 5.0});
  const auto re_A = empirical_reactive_entrance(chain, L::A);
  const auto re_B = empirical_reactive_entrance(chain, L::B);
  const auto ex_A = empirical_reactive_exit(chain, L::A);
  CHECK(re_A.size() == 2);
  CHECK(re_B.size() == 1);
  CHECK(ex_A.size() == 1);
  CHECK(re_A[0].time == doctest::Approx(2.0));
  CHECK(re_A[1].time == doctest::Approx(5.0));
  CHECK(re_B[0].time == doctest::Approx(4.0));
  CHECK(ex_A[0].time == doctest::Approx(3.0));
  // entrance sets into A and B are disjoint index sets
  for (const auto& a : re_A)
    for (const auto& b : re_B) CHECK(a.time != b.time);
}

TEST_SUITE_END();
