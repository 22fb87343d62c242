#pragma once

// Change detectors used by the baseline policies: a Bernoulli GLR test and
// the two-half windowed-mean test of M-UCB.

#include <cstdint>
#include <span>
#include <vector>

namespace rbocoop {

/// KL(Ber(p) || Ber(q)) with 0 log 0 = 0; +infinity when q ∈ {0,1} and p ≠ q.
double bernoulli_kl(double p, double q);

/// β(n, δ) = log(c · n^e / δ); defaults c = 3, e = 3/2.
struct GlrThreshold {
  double constant = 3.0;
  double exponent = 1.5;

  double operator()(std::int64_t n, double delta) const;
};

/// sup over split points s ∈ [1, n) of
///   n_{1:s} kl(μ̂_{1:s}, μ̂_{1:n}) + n_{s+1:n} kl(μ̂_{s+1:n}, μ̂_{1:n}).
/// Zero for n < 2.
double glr_statistic(std::span<const double> xs);

class GlrDetector {
 public:
  /// `stride` evaluates the test only every stride-th observation.
  explicit GlrDetector(double delta, int stride = 1, GlrThreshold threshold = {});

  void ingest(double x);
  /// The test on the current buffer (false below two observations or
  /// between strided evaluation points).
  bool detect() const;
  double statistic() const;
  void reset();

  std::size_t size() const noexcept { return prefix_.size() - 1; }
  double delta() const noexcept { return delta_; }

 private:
  double delta_;
  int stride_;
  GlrThreshold threshold_;
  std::vector<double> prefix_{0.0};
  bool binary_ = true;
};

/// b = sqrt(ω log(2 M T²) / 2).
double mucb_threshold(int window, int arms, std::int64_t horizon);

class WindowDetector {
 public:
  /// `window` must be even and positive.
  WindowDetector(int window, double threshold);

  void ingest(double x);
  /// |Σ newest ω/2 − Σ oldest ω/2| > b; false until ω observations are held.
  bool detect() const;
  void reset();

  std::size_t size() const noexcept { return count_; }
  bool full() const noexcept { return count_ == buf_.size(); }
  int window() const noexcept { return static_cast<int>(buf_.size()); }
  double threshold() const noexcept { return threshold_; }
  /// Held observations, oldest first.
  std::vector<double> contents() const;

 private:
  std::vector<double> buf_;
  std::size_t head_ = 0;  // slot of the oldest observation once full
  std::size_t count_ = 0;
  double threshold_;
};

/// The window test on an explicit buffer (oldest first, even length).
bool window_test(std::span<const double> buffer, double threshold);

}  // namespace rbocoop
