#include <doctest.h>

#include <cmath>
#include <numeric>

#include "../support/oracles.hpp"
#include "rbocoop/rbocpd.hpp"

using namespace rbocoop;

TEST_CASE("laplace predictor") {
  CHECK(laplace_predict(0, 0, 1) == 0.5);
  CHECK(laplace_predict(0, 0, 0) == 0.5);
  CHECK(laplace_predict(1, 2, 1) == 0.5);
  CHECK(laplace_predict(3, 3, 1) == doctest::Approx(0.8));
  CHECK_THROWS(laplace_predict(0, 0, 0.5));
}

TEST_CASE("forecaster loss") {
  CHECK(forecaster_loss(0, 0, 1) == doctest::Approx(std::log(2.0)));
  CHECK(forecaster_loss(3, 3, 1) == doctest::Approx(-std::log(0.8)));
  CHECK(forecaster_loss(0, 0, 0.5) == doctest::Approx(std::log(2.0)));
  CHECK(forecaster_loss(2, 3, 0.25) ==
        doctest::Approx(-0.25 * std::log(3.0 / 5.0) - 0.75 * std::log(2.0 / 5.0)));
}

TEST_CASE("first observations") {
  ForecasterBank bank(HazardSchedule::constant(1e-3));
  CHECK(bank.empty());
  CHECK_FALSE(bank.restart_check());
  bank.ingest(0);
  CHECK(bank.size() == 1);
  CHECK(bank.log_weights()[0] == 0.0);
  CHECK_FALSE(bank.restart_check());
  bank.ingest(0);
  REQUIRE(bank.size() == 2);
  CHECK(bank.log_weights()[0] == doctest::Approx(std::log(2.0 / 3.0)));
  CHECK(bank.log_weights()[1] == doctest::Approx(std::log(1e-3) - std::log(2.0)));
  CHECK(bank.cumulative_loss() == doctest::Approx(std::log(2.0) - std::log(2.0 / 3.0)));
}

TEST_CASE("incremental weights match the batch recomputation") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> log_eta(std::log(1e-6), std::log(1e-1));
  for (int seq = 0; seq < 100; ++seq) {
    const double eta = std::exp(log_eta(gen));
    const auto len = 1 + static_cast<std::size_t>(gen() % 64);
    const double bias = uniform01(gen);
    std::vector<double> xs(len);
    for (auto& x : xs) x = uniform01(gen) < bias ? 1.0 : 0.0;

    ForecasterBank bank(HazardSchedule::constant(eta));
    const oracle::Hazard h = [eta](auto, auto, auto) { return eta; };
    for (std::size_t t = 1; t <= len; ++t) {
      bank.ingest(xs[t - 1]);
      const auto ref = oracle::batch_log_weights(xs, t, h);
      REQUIRE(bank.size() == ref.size());
      for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(bank.log_weights()[i] - ref[i]) <= 1e-9);
      CHECK(bank.restart_check() == oracle::batch_restart(ref));
    }
    CHECK(run_offline(xs, HazardSchedule::constant(eta)) == oracle::batch_first_restart(xs, h));
  }
}

TEST_CASE("non-constant hazard and fractional observations match the batch recomputation") {
  std::mt19937_64 gen(99);
  const oracle::Hazard inv = [](std::int64_t r, std::int64_t, std::int64_t t) { return 0.5 / static_cast<double>(t - r + 1); };
  for (int seq = 0; seq < 20; ++seq) {
    std::vector<double> xs(40);
    for (auto& x : xs) x = uniform01(gen);
    ForecasterBank bank(HazardSchedule::inverse_run_length(0.5));
    for (std::size_t t = 1; t <= xs.size(); ++t) {
      bank.ingest(xs[t - 1]);
      const auto ref = oracle::batch_log_weights(xs, t, inv);
      for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(bank.log_weights()[i] - ref[i]) <= 1e-9);
    }
  }
}

TEST_CASE("custom hazard equals the equivalent built-in one") {
  ForecasterBank a(HazardSchedule::inverse_run_length(2.0));
  ForecasterBank b(HazardSchedule::custom([](std::int64_t r, std::int64_t, std::int64_t t) { return 2.0 / static_cast<double>(t - r + 1); }));
  SplitMix64 gen(5);
  for (int i = 0; i < 80; ++i) {
    const double x = uniform01(gen) < (i < 40 ? 0.2 : 0.9) ? 1.0 : 0.0;
    a.ingest(x);
    b.ingest(x);
    CHECK(a.restart_check() == b.restart_check());
    for (std::size_t s = 0; s < a.size(); ++s) CHECK(a.log_weights()[s] == doctest::Approx(b.log_weights()[s]));
  }
}

TEST_CASE("restart test is invariant to a common shift") {
  std::mt19937_64 gen(8);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> w(1 + gen() % 10);
    for (auto& v : w) v = -20.0 * uniform01(gen);
    const bool base = ForecasterBank::restart_test(w);
    for (double c : {-50.0, 3.0, 700.0}) {
      auto shifted = w;
      for (auto& v : shifted) v += c;
      CHECK(ForecasterBank::restart_test(shifted) == base);
    }
  }
  CHECK_FALSE(ForecasterBank::restart_test(std::vector<double>{0.0}));
}

TEST_CASE("normalized weights form a distribution") {
  ForecasterBank bank(HazardSchedule::constant(0.01));
  SplitMix64 gen(1);
  for (int t = 0; t < 300; ++t) {
    bank.ingest(uniform01(gen) < 0.4 ? 1.0 : 0.0);
    const auto w = bank.normalized_weights();
    CHECK(std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) <= 1e-12);
  }
}

TEST_CASE("offline replay") {
  CHECK_FALSE(run_offline(std::vector<double>(10, 0.0), HazardSchedule::constant(1e-3)).has_value());
  CHECK_FALSE(run_offline(std::vector<double>{}, HazardSchedule::constant(1e-3)).has_value());
  std::vector<double> xs(60, 0.0);
  std::fill(xs.begin() + 30, xs.end(), 1.0);
  const auto hit = run_offline(xs, HazardSchedule::constant(1e-3));
  REQUIRE(hit.has_value());
  CHECK(*hit > 30);
  CHECK(*hit < 45);
}

TEST_CASE("reset") {
  ForecasterBank bank(HazardSchedule::constant(1e-2), true);
  for (int i = 0; i < 5; ++i) bank.ingest(i % 2);
  CHECK(bank.audit());
  bank.reset();
  CHECK(bank.size() == 0);
  CHECK(bank.run_start() == 6);
  bank.reset(6);
  CHECK(bank.size() == 0);
  bank.ingest(1);
  CHECK(bank.size() == 1);
  CHECK(bank.last_index() == 6);
  CHECK_FALSE(bank.restart_check());
}

TEST_CASE("forecaster sums stay consistent with the retained stream") {
  ForecasterBank bank(HazardSchedule::constant(1e-3), true);
  SplitMix64 gen(77);
  for (int i = 0; i < 500; ++i) bank.ingest(uniform01(gen));
  CHECK(bank.audit());
  CHECK(bank.retained_stream().size() == 500);
}

TEST_CASE("hazard validation") {
  CHECK_THROWS(HazardSchedule::constant(0.0));
  CHECK_THROWS(HazardSchedule::constant(-1.0));
  CHECK_THROWS(HazardSchedule::inverse_run_length(0.0));
  CHECK_THROWS(HazardSchedule::custom(nullptr));
}
