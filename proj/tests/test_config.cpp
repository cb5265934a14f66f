#include <doctest.h>

#include "hillgate/config.hpp"

using namespace hillgate;

namespace {

const char* kMinimal = R"(
[field]
potential = double_well_1d

[thermo]
gamma = 1.0
beta = 2.0

[region_a]
shape = ball
center = -1.0
radius = 0.3

[region_b]
shape = ball
center = 1.0
radius = 0.3
)";

}  // namespace

TEST_SUITE_BEGIN("config");

TEST_CASE("minimal config parses with defaults") {
  const auto cfg = parse_config_text(kMinimal);
  CHECK(cfg.beta == doctest::Approx(2.0));
  CHECK(cfg.dt == doctest::Approx(1e-3));
  CHECK(cfg.scheme == "baoab");
  CHECK(cfg.seed == 7012);
  CHECK(cfg.make_field().is_conservative());
}

TEST_CASE("serialize then parse is the identity") {
  auto cfg = parse_config_text(kMinimal);
  cfg.n_samples = 777;
  cfg.observable = "speed_indicator";
  cfg.obs_threshold = 1.5;
  const auto cfg2 = parse_config_text(cfg.serialize());
  CHECK(cfg2.serialize() == cfg.serialize());
  CHECK(cfg2.hash() == cfg.hash());
  CHECK(cfg2.n_samples == 777);
}

TEST_CASE("missing required key names the key") {
  const char* text = R"(
[field]
potential = double_well_1d
[thermo]
gamma = 1.0
[region_a]
shape = ball
center = -1.0
radius = 0.3
[region_b]
shape = ball
center = 1.0
radius = 0.3
)";
  CHECK_THROWS_WITH_AS(parse_config_text(text), doctest::Contains("beta"), Error);
}

TEST_CASE("unknown keys and sections are rejected") {
  std::string text = kMinimal;
  SUBCASE("unknown key") {
    text += "\n[sim]\ncrossing_tol = 1e-10\ncrossingtol = 1e-10\n";
    CHECK_THROWS_WITH_AS(parse_config_text(text), doctest::Contains("crossingtol"), Error);
  }
  SUBCASE("unknown section") {
    text += "\n[simm]\ndt = 1e-3\n";
    CHECK_THROWS_WITH_AS(parse_config_text(text), doctest::Contains("simm"), Error);
  }
  SUBCASE("duplicate key") {
    text += "\n[sim]\ndt = 1e-3\ndt = 2e-3\n";
    CHECK_THROWS_WITH_AS(parse_config_text(text), doctest::Contains("duplicate"), Error);
  }
}

TEST_CASE("malformed input is rejected with line context") {
  SUBCASE("unterminated section header") {
    CHECK_THROWS_WITH_AS(parse_config_text("[field\npotential = double_well_1d\n"),
                         doctest::Contains("section"), Error);
  }
  SUBCASE("line without an equals sign") {
    std::string text = kMinimal;
    text += "\n[sim]\ndt 1e-3\n";
    CHECK_THROWS_WITH_AS(parse_config_text(text), doctest::Contains("key = value"), Error);
  }
  SUBCASE("bad number") {
    std::string text = kMinimal;
    text += "\n[sim]\ndt = fast\n";
    CHECK_THROWS_WITH_AS(parse_config_text(text), doctest::Contains("fast"), Error);
  }
  SUBCASE("bad scheme name") {
    std::string text = kMinimal;
    text += "\n[sim]\nscheme = leapfrog\n";
    CHECK_THROWS_WITH_AS(parse_config_text(text), doctest::Contains("leapfrog"), Error);
  }
}

TEST_CASE("overlapping regions fail at load") {
  std::string text = kMinimal;
  const auto pos = text.find("center = -1.0");
  text.replace(pos, 13, "center = 0.85");
  CHECK_THROWS_WITH_AS(parse_config_text(text), doctest::Contains("disjoint"), Error);
}

TEST_CASE("config hash is stable and sensitive") {
  const auto cfg = parse_config_text(kMinimal);
  auto cfg2 = cfg;
  CHECK(cfg.hash() == cfg2.hash());
  cfg2.beta = 2.5;
  CHECK(cfg.hash() != cfg2.hash());
}

TEST_SUITE_END();
