#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rbocoop/detectors.hpp"
#include "rbocoop/rng.hpp"

using namespace rbocoop;

namespace {

// Direct O(n²) evaluation with explicit means.
double brute_glr(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  double best = 0.0;
  double all = 0.0;
  for (double x : xs) all += x;
  const double mu = all / static_cast<double>(n);
  for (std::size_t s = 1; s < n; ++s) {
    double a = 0.0;
    for (std::size_t i = 0; i < s; ++i) a += xs[i];
    const double b = all - a;
    const double v = static_cast<double>(s) * bernoulli_kl(a / static_cast<double>(s), mu) +
                     static_cast<double>(n - s) * bernoulli_kl(b / static_cast<double>(n - s), mu);
    best = std::max(best, v);
  }
  return best;
}

}  // namespace

TEST_CASE("bernoulli kl") {
  CHECK(bernoulli_kl(0.3, 0.3) == doctest::Approx(0.0));
  CHECK(bernoulli_kl(0.5, 0.25) == doctest::Approx(0.1438).epsilon(1e-3));
  CHECK(bernoulli_kl(0.0, 0.5) == doctest::Approx(std::log(2.0)));
  CHECK(std::isinf(bernoulli_kl(0.5, 0.0)));
  CHECK(bernoulli_kl(1.0, 1.0) == 0.0);
}

TEST_CASE("glr statistic matches a direct evaluation") {
  SplitMix64 gen(12);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> xs(2 + gen() % 120);
    const double p = uniform01(gen);
    for (auto& x : xs) x = uniform01(gen) < p ? 1.0 : 0.0;
    CHECK(glr_statistic(xs) == doctest::Approx(brute_glr(xs)).epsilon(1e-9));
  }
  std::vector<double> frac{0.1, 0.4, 0.9, 0.95, 0.2};
  CHECK(glr_statistic(frac) == doctest::Approx(brute_glr(frac)).epsilon(1e-9));
}

TEST_CASE("glr detector examples") {
  GlrDetector zeros(1e-3);
  for (int i = 0; i < 100; ++i) zeros.ingest(0.0);
  CHECK(zeros.statistic() == 0.0);
  CHECK_FALSE(zeros.detect());

  GlrDetector step(1e-3);
  for (int i = 0; i < 50; ++i) step.ingest(0.0);
  for (int i = 0; i < 50; ++i) step.ingest(1.0);
  CHECK(step.statistic() == doctest::Approx(100.0 * std::log(2.0)));
  CHECK(step.statistic() > GlrThreshold{}(100, 1e-3));
  CHECK(step.detect());

  GlrDetector one(1e-3);
  one.ingest(1.0);
  CHECK_FALSE(one.detect());
  step.reset();
  CHECK(step.size() == 0);
  CHECK_FALSE(step.detect());
}

TEST_CASE("glr threshold") {
  CHECK(GlrThreshold{}(100, 0.01) == doctest::Approx(std::log(3.0 * 1000.0 / 0.01)));
}

TEST_CASE("glr stride only evaluates at multiples") {
  GlrDetector d(1e-3, 7);
  for (int i = 0; i < 50; ++i) d.ingest(0.0);
  for (int i = 0; i < 49; ++i) d.ingest(1.0);
  CHECK(d.size() == 99);
  CHECK_FALSE(d.detect());
  d.ingest(1.0);
  CHECK_FALSE(d.detect());
  for (int i = 0; i < 5; ++i) d.ingest(1.0);
  CHECK(d.size() == 105);
  CHECK(d.detect());
}

TEST_CASE("m-ucb threshold and window test") {
  CHECK(mucb_threshold(800, 5, 10000) == doctest::Approx(std::sqrt(400.0 * std::log(1e9))));
  const double b = mucb_threshold(800, 5, 10000);

  WindowDetector flat(800, b);
  for (int i = 0; i < 800; ++i) flat.ingest(0.5);
  CHECK(flat.full());
  CHECK_FALSE(flat.detect());

  WindowDetector step(800, b);
  for (int i = 0; i < 400; ++i) step.ingest(0.0);
  for (int i = 0; i < 400; ++i) step.ingest(1.0);
  CHECK(step.detect());

  WindowDetector partial(800, b);
  for (int i = 0; i < 10; ++i) partial.ingest(1.0);
  CHECK_FALSE(partial.full());
  CHECK_FALSE(partial.detect());
}

TEST_CASE("window detector keeps the newest observations in order") {
  WindowDetector d(4, 1.5);
  for (int i = 1; i <= 6; ++i) d.ingest(i);
  CHECK(d.contents() == std::vector<double>{3, 4, 5, 6});
  CHECK(window_test(d.contents(), 1.5) == (std::abs((5.0 + 6.0) - (3.0 + 4.0)) > 1.5));
  d.reset();
  CHECK(d.size() == 0);
  CHECK_THROWS(WindowDetector(3, 1.0));
  CHECK_THROWS(WindowDetector(0, 1.0));
}

TEST_CASE("window test agrees with the ring buffer") {
  SplitMix64 gen(4);
  WindowDetector d(10, 2.0);
  std::vector<double> all;
  for (int i = 0; i < 200; ++i) {
    const double x = uniform01(gen) < (i < 100 ? 0.2 : 0.8) ? 1.0 : 0.0;
    d.ingest(x);
    all.push_back(x);
    if (all.size() >= 10) {
      std::vector<double> tail(all.end() - 10, all.end());
      CHECK(d.detect() == window_test(tail, 2.0));
    }
  }
}
