// Acceptance suite: runs every consistency criterion at full scale and prints
// one pass/fail line per criterion. HILLGATE_ACCEPTANCE_QUICK=1 switches to
// the reduced-scale profile (same tolerances).
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>
#include <cstdlib>

#include "hillgate/validation.hpp"

namespace {

const std::vector<hillgate::CriterionResult>& results() {
  static const std::vector<hillgate::CriterionResult> r = [] {
    hillgate::ValidationOptions opts;
    const char* quick = std::getenv("HILLGATE_ACCEPTANCE_QUICK");
    opts.quick = quick != nullptr && quick[0] == '1';
    const char* threads = std::getenv("HILLGATE_THREADS");
    if (threads != nullptr) opts.threads = std::max(1, std::atoi(threads));
    auto res = hillgate::run_acceptance_suite(opts);
    for (const auto& c : res)
      std::printf("[%s] criterion %2d: %s  (%.1fs)  %s\n", c.pass ? "PASS" : "FAIL", c.id,
                  c.name.c_str(), c.seconds, c.details.c_str());
    std::fflush(stdout);
    return res;
  }();
  return r;
}

void check_criterion(int id) {
  for (const auto& c : results()) {
    if (c.id != id) continue;
    INFO(c.name, ": ", c.details);
    CHECK(c.pass);
    return;
  }
  FAIL("criterion not found");
}

}  // namespace

TEST_CASE("criterion 1: finite-chain Hill equality") { check_criterion(1); }
TEST_CASE("criterion 2: representation formula equality") { check_criterion(2); }
TEST_CASE("criterion 3: Langevin Hill consistency") { check_criterion(3); }
TEST_CASE("criterion 4: observable statistics consistency") { check_criterion(4); }
TEST_CASE("criterion 5: boundary law of entry chain") { check_criterion(5); }
TEST_CASE("criterion 6: exact-sampler invariance") { check_criterion(6); }
TEST_CASE("criterion 7: Z+ equals Z-") { check_criterion(7); }
TEST_CASE("criterion 8: reversibility identities") { check_criterion(8); }
TEST_CASE("criterion 9: capacity symmetry") { check_criterion(9); }
TEST_CASE("criterion 10: AMS validation") { check_criterion(10); }
TEST_CASE("criterion 11: dt robustness") { check_criterion(11); }

int main(int argc, char** argv) {
  doctest::Context context(argc, argv);
  return context.run();
}
