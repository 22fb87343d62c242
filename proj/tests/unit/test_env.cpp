#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "rbocoop/env.hpp"
#include "rbocoop/error.hpp"

using namespace rbocoop;

namespace {

EnvironmentSpec two_segment() {
  return EnvironmentSpec(10000, 3, {{1, {0.5, 0.2, 0.1}, {}}, {2500, {0.5, 0.9, 0.1}, {}}});
}

}  // namespace

TEST_CASE("segment count") {
  CHECK(EnvironmentSpec(100, 2, {{1, {0.1, 0.2}, {}}}).num_segments() == 1);
  CHECK(two_segment().num_segments() == 2);
  CHECK(two_segment().change_points() == std::vector<std::int64_t>{1, 2500});
}

TEST_CASE("mean lookup uses half-open segments") {
  const auto env = two_segment();
  CHECK(env.mean_at(1, 0) == 0.5);
  CHECK(env.mean_at(2499, 1) == 0.2);
  CHECK(env.mean_at(2500, 1) == 0.9);
  CHECK(env.mean_at(10000, 1) == 0.9);
  CHECK_THROWS_AS(env.mean_at(0, 0), std::out_of_range);
  CHECK_THROWS_AS(env.mean_at(10001, 0), std::out_of_range);
  CHECK_THROWS_AS(env.mean_at(1, 3), std::out_of_range);
}

TEST_CASE("optimal arm breaks ties toward the lowest index") {
  CHECK(EnvironmentSpec(10, 3, {{1, {0.2, 0.8, 0.5}, {}}}).optimal_arm(1) == 1);
  CHECK(EnvironmentSpec(10, 3, {{1, {0.8, 0.8, 0.1}, {}}}).optimal_arm(1) == 0);
  CHECK(two_segment().optimal_arm(3000) == 1);
}

TEST_CASE("degenerate and empirical Bernoulli draws") {
  const EnvironmentSpec env(10, 3, {{1, {1.0, 0.0, 0.3}, {}}});
  SplitMix64 gen(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(env.sample(1, 0, gen) == 1.0);
    CHECK(env.sample(1, 1, gen) == 0.0);
  }
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += env.sample(1, 2, gen);
  CHECK(std::abs(sum / n - 0.3) <= 3.0 * std::sqrt(0.3 * 0.7 / n));
}

TEST_CASE("bounded family keeps the prescribed mean") {
  Segment s{1, {0.4, 0.7}, {{SamplerDescriptor::Kind::Mixture, 0.5}, {SamplerDescriptor::Kind::Beta, 4.0}}};
  const EnvironmentSpec env(10, 2, {s}, RewardFamily::BoundedGeneric);
  SplitMix64 gen(3);
  double a = 0.0, b = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = env.sample(1, 0, gen);
    const double y = env.sample(1, 1, gen);
    CHECK((x >= 0.0 && x <= 1.0));
    CHECK((y >= 0.0 && y <= 1.0));
    a += x;
    b += y;
  }
  CHECK(a / n == doctest::Approx(0.4).epsilon(0.01));
  CHECK(b / n == doctest::Approx(0.7).epsilon(0.01));
}

TEST_CASE("invariants are enforced at construction") {
  CHECK_THROWS_AS(EnvironmentSpec(100, 2, {{1, {0.1, 0.2}, {}}, {1, {0.2, 0.2}, {}}}), ConfigError);
  CHECK_THROWS_AS(EnvironmentSpec(100, 2, {{2, {0.1, 0.2}, {}}}), ConfigError);
  CHECK_THROWS_AS(EnvironmentSpec(100, 2, {{1, {0.1, 1.2}, {}}}), ConfigError);
  CHECK_THROWS_AS(EnvironmentSpec(100, 2, {{1, {0.1}, {}}}), ConfigError);
  CHECK_THROWS_AS(EnvironmentSpec(100, 2, {{1, {0.1, 0.2}, {}}, {50, {0.1, 0.2}, {}}}), ConfigError);
  CHECK_THROWS_AS(EnvironmentSpec(100, 2, {{1, {0.1, 0.2}, {}}, {101, {0.3, 0.2}, {}}}), ConfigError);
}

TEST_CASE("json round trip and parse diagnostics") {
  const auto env = two_segment();
  CHECK(spec_from_json(spec_to_json(env)) == env);

  const auto path = std::filesystem::temp_directory_path() / "rbocoop_env_roundtrip.json";
  save_spec(env, path);
  CHECK(load_spec(path) == env);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(spec_from_json(nlohmann::json::parse(
                      R"({"horizon":10,"arms":2,"segments":[{"start":1,"means":[]}]})")),
                  ParseError);
  CHECK_THROWS_AS(spec_from_json(nlohmann::json::parse(
                      R"({"horizon":10,"arms":2,"segments":[{"start":1,"means":[0.1,0.2]},{"start":1,"means":[0.3,0.2]}]})")),
                  ConfigError);
  try {
    parse_json_text("{\n  \"horizon\": 10,\n  oops\n}");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(load_spec("/nonexistent/env.json"), IoError);
}

TEST_CASE("mean trajectories csv") {
  const EnvironmentSpec env(3, 2, {{1, {0.1, 0.2}, {}}, {3, {0.5, 0.2}, {}}});
  std::ostringstream out;
  write_mean_trajectories_csv(env, out);
  CHECK(out.str() == "t,mean_1,mean_2\n1,0.1,0.2\n2,0.1,0.2\n3,0.5,0.2\n");
}
