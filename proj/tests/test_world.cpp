#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sensemap/world.hpp"

using namespace sensemap;

TEST_CASE("generate_environment is seeded and respects the range") {
  const Environment a = generate_environment(42, 5, -4.0, 5.0);
  const Environment b = generate_environment(42, 5, -4.0, 5.0);
  REQUIRE(a.sources.size() == 5);
  REQUIRE(a.offset == 0.0);
  for (std::size_t i = 0; i < a.sources.size(); ++i) {
    REQUIRE(a.sources[i].position == b.sources[i].position);
    REQUIRE(a.sources[i].position >= -4.0);
    REQUIRE(a.sources[i].position < 5.0);
  }
  const Environment c = generate_environment(43, 5, -4.0, 5.0);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.sources.size(); ++i)
    any_diff = any_diff || a.sources[i].position != c.sources[i].position;
  REQUIRE(any_diff);
}

TEST_CASE("generate_environment rejects bad arguments") {
  REQUIRE_THROWS_AS(generate_environment(1, 0, -4.0, 5.0), ConfigError);
  REQUIRE_THROWS_AS(generate_environment(1, 5, 5.0, -4.0), ConfigError);
  REQUIRE_THROWS_AS(generate_environment(1, 5, 2.0, 2.0), ConfigError);
}

TEST_CASE("luminance of a single source peaks at 1 and follows the Gaussian") {
  Environment env;
  env.sources = {{0.3}};
  REQUIRE(luminance(env, 0.3) == 1.0);
  REQUIRE(luminance(env, 0.4) == Catch::Approx(std::exp(-0.01 / 0.2)).epsilon(1e-15));
  REQUIRE(luminance(env, 0.2) == Catch::Approx(luminance(env, 0.4)).epsilon(1e-15));
  REQUIRE(luminance(env, 5.0) < 1e-30);
}

TEST_CASE("luminance is additive over sources") {
  Environment one_a, one_b, both;
  one_a.sources = {{0.2}};
  one_b.sources = {{0.7}};
  both.sources = {{0.2}, {0.7}};
  for (double x : {0.0, 0.25, 0.5, 0.9}) {
    REQUIRE(luminance(both, x) ==
            Catch::Approx(luminance(one_a, x) + luminance(one_b, x)).epsilon(1e-15));
  }
}

TEST_CASE("shift_environment accumulates a rigid offset") {
  Environment env;
  env.sources = {{0.5}};
  const Environment shifted = shift_environment(shift_environment(env, 0.1), 0.2);
  REQUIRE(shifted.offset == Catch::Approx(0.3).margin(1e-15));
  // shifting the sources right by d moves the profile right by d
  REQUIRE(luminance(shifted, 0.8) == Catch::Approx(luminance(env, 0.5)).epsilon(1e-12));
  REQUIRE(env.offset == 0.0);  // input left untouched
}

TEST_CASE("environment JSON round-trip") {
  Environment env;
  env.sources = {{-3.25}, {0.5}, {4.75}};
  env.offset = 0.31;
  const Environment back = environment_from_json(environment_to_json(env));
  REQUIRE(back.sources.size() == env.sources.size());
  for (std::size_t i = 0; i < env.sources.size(); ++i)
    REQUIRE(back.sources[i].position == env.sources[i].position);
  REQUIRE(back.offset == env.offset);
}

TEST_CASE("environment JSON rejects malformed input") {
  REQUIRE_THROWS_AS(environment_from_json(nlohmann::json::object()), IoError);
  nlohmann::json j;
  j["sources"] = {0.1, "oops"};
  j["offset"] = 0.0;
  REQUIRE_THROWS_AS(environment_from_json(j), IoError);
  nlohmann::json k;
  k["sources"] = {0.1};
  REQUIRE_THROWS_AS(environment_from_json(k), IoError);
}
