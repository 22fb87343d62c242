#include "rbocoop/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rbocoop/log_table.hpp"

namespace rbocoop {

double bernoulli_kl(double p, double q) {
  if (q <= 0.0 || q >= 1.0) return p == q ? 0.0 : std::numeric_limits<double>::infinity();
  double kl = 0.0;
  if (p > 0.0) kl += p * std::log(p / q);
  if (p < 1.0) kl += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  return std::max(kl, 0.0);
}

double GlrThreshold::operator()(std::int64_t n, double delta) const {
  return std::log(constant * std::pow(static_cast<double>(n), exponent) / delta);
}

namespace {

// n·kl(S/n, μ) summed over both halves equals the entropy difference
// H(n1,S1) + H(n2,S2) − H(n,S) with H(n,S) = S log S + (n−S) log(n−S) − n log n.
// On 0/1 data every term is an integer x log x, read from the table.
double split_scan_binary(std::span<const double> prefix) {
  const auto& lt = detail::LogTable::instance();
  const std::int64_t n = static_cast<std::int64_t>(prefix.size()) - 1;
  const auto total = static_cast<std::int64_t>(prefix[static_cast<std::size_t>(n)]);
  auto h = [&lt](std::int64_t len, std::int64_t s) { return lt.xlogx(s) + lt.xlogx(len - s) - lt.xlogx(len); };
  const double whole = h(n, total);
  double best = 0.0;
  for (std::int64_t s = 1; s < n; ++s) {
    const auto s1 = static_cast<std::int64_t>(prefix[static_cast<std::size_t>(s)]);
    best = std::max(best, h(s, s1) + h(n - s, total - s1) - whole);
  }
  return best;
}

double split_scan_general(std::span<const double> prefix) {
  const std::size_t n = prefix.size() - 1;
  const double total = prefix[n];
  const double mu = total / static_cast<double>(n);
  double best = 0.0;
  for (std::size_t s = 1; s < n; ++s) {
    const double n1 = static_cast<double>(s);
    const double n2 = static_cast<double>(n - s);
    const double mu1 = prefix[s] / n1;
    const double mu2 = (total - prefix[s]) / n2;
    best = std::max(best, n1 * bernoulli_kl(mu1, mu) + n2 * bernoulli_kl(mu2, mu));
  }
  return best;
}

}  // namespace

double glr_statistic(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  std::vector<double> prefix(xs.size() + 1, 0.0);
  bool binary = true;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    prefix[i + 1] = prefix[i] + xs[i];
    binary = binary && detail::is_binary(xs[i]);
  }
  return binary ? split_scan_binary(prefix) : split_scan_general(prefix);
}

GlrDetector::GlrDetector(double delta, int stride, GlrThreshold threshold)
    : delta_(delta), stride_(stride), threshold_(threshold) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("GLR: δ must lie in (0,1)");
  if (stride < 1) throw std::invalid_argument("GLR: stride must be ≥ 1");
}

void GlrDetector::ingest(double x) {
  prefix_.push_back(prefix_.back() + x);
  binary_ = binary_ && detail::is_binary(x);
}

double GlrDetector::statistic() const {
  if (size() < 2) return 0.0;
  return binary_ ? split_scan_binary(prefix_) : split_scan_general(prefix_);
}

bool GlrDetector::detect() const {
  const auto n = static_cast<std::int64_t>(size());
  if (n < 2 || n % stride_ != 0) return false;
  return statistic() >= threshold_(n, delta_);
}

void GlrDetector::reset() {
  prefix_.assign(1, 0.0);
  binary_ = true;
}

double mucb_threshold(int window, int arms, std::int64_t horizon) {
  const double t = static_cast<double>(horizon);
  return std::sqrt(window * std::log(2.0 * arms * t * t) / 2.0);
}

WindowDetector::WindowDetector(int window, double threshold)
    : buf_(static_cast<std::size_t>(window > 0 ? window : 0), 0.0), threshold_(threshold) {
  if (window < 2 || window % 2 != 0) throw std::invalid_argument("window detector: ω must be even and ≥ 2");
}

void WindowDetector::ingest(double x) {
  if (count_ < buf_.size()) {
    buf_[count_++] = x;
    return;
  }
  buf_[head_] = x;
  head_ = (head_ + 1) % buf_.size();
}

std::vector<double> WindowDetector::contents() const {
  std::vector<double> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < count_; ++i) out.push_back(buf_[(head_ + i) % buf_.size()]);
  return out;
}

bool window_test(std::span<const double> buffer, double threshold) {
  const std::size_t half = buffer.size() / 2;
  double old_sum = 0.0;
  double new_sum = 0.0;
  for (std::size_t i = 0; i < half; ++i) old_sum += buffer[i];
  for (std::size_t i = half; i < buffer.size(); ++i) new_sum += buffer[i];
  return std::abs(new_sum - old_sum) > threshold;
}

bool WindowDetector::detect() const {
  if (!full()) return false;
  const std::size_t w = buf_.size();
  const std::size_t half = w / 2;
  double old_sum = 0.0;
  double new_sum = 0.0;
  for (std::size_t i = 0; i < half; ++i) old_sum += buf_[(head_ + i) % w];
  for (std::size_t i = half; i < w; ++i) new_sum += buf_[(head_ + i) % w];
  return std::abs(new_sum - old_sum) > threshold_;
}

void WindowDetector::reset() {
  head_ = 0;
  count_ = 0;
}

}  // namespace rbocoop
