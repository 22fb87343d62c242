#include "rbocoop/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace rbocoop {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double coop_false_alarm(int degree, double delta) {
  if (degree < 1) throw std::invalid_argument("coop_false_alarm: degree must be >= 1");
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("coop_false_alarm: delta must lie in [0,1]");
  if (delta == 0.0) return 0.0;
  if (delta == 1.0) return 1.0;
  const int lo = (degree + 1) / 2;
  // Terms in log space: C(η, j) overflows doubles long before the
  // probabilities become interesting.
  double sigma = 0.0;
  for (int j = lo; j <= degree; ++j) {
    const double log_c = std::lgamma(degree + 1.0) - std::lgamma(j + 1.0) - std::lgamma(degree - j + 1.0);
    sigma += std::exp(log_c + j * std::log(delta) + (degree - j) * std::log1p(-delta));
  }
  return std::min(sigma, 1.0);
}

double confidence_radius(double n1, double n2, double n_total, double delta) {
  if (!(n1 >= 1.0 && n2 >= 1.0 && n_total >= 2.0)) throw std::invalid_argument("confidence_radius: counts too small");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("confidence_radius: delta must lie in (0,1)");
  const double a = (1.0 + 1.0 / n1) / n1 * std::log(2.0 * std::sqrt(n1 + 1.0) / delta);
  const double ln = std::log(n_total);
  const double b =
      (1.0 + 1.0 / n2) / n2 * std::log(2.0 * n_total * std::sqrt(n2 + 1.0) * ln * ln / (std::numbers::ln2 * delta));
  return std::numbers::sqrt2 / 2.0 * (std::sqrt(std::max(a, 0.0)) + std::sqrt(std::max(b, 0.0)));
}

double delay_offset(double n_before, double d) {
  return std::log(n_before + 1.0) + std::log(d + 1.0) - 0.5 * std::log(n_before + d) + 9.0 / 8.0;
}

double relative_gap(std::int64_t r, std::int64_t nu, std::int64_t s, std::int64_t t, double gap) {
  if (!(r <= s && s <= t)) throw std::invalid_argument("relative_gap: need r <= s <= t");
  auto count = [](std::int64_t a, std::int64_t b) { return static_cast<double>(std::max<std::int64_t>(0, b - a + 1)); };
  if (nu <= s) {
    const double before = count(r, nu - 1);
    const double upto_s = count(r, s - 1);
    return upto_s > 0.0 ? before / upto_s * gap : gap;
  }
  return count(nu, t) / count(s, t) * gap;
}

std::string to_string(DelayResult::Status s) {
  switch (s) {
    case DelayResult::Status::Found: return "found";
    case DelayResult::Status::Undetectable: return "undetectable";
    case DelayResult::Status::CapExceeded: return "cap-exceeded";
  }
  return "?";
}

double delay_eta_lower_bound(double gap, std::int64_t n_before, std::int64_t d, double delta) {
  const double n = static_cast<double>(n_before);
  const double dd = static_cast<double>(d);
  const double c = confidence_radius(n, dd, n + dd, delta);
  const double e = gap - c;
  return std::exp(-2.0 * n * e * e + delay_offset(n, dd));
}

DelayResult detection_delay(double gap, std::int64_t n_before, double delta, const HazardSchedule& eta,
                            std::int64_t cap) {
  if (!(gap > 0.0 && gap <= 1.0)) throw std::invalid_argument("detection_delay: gap must lie in (0,1]");
  if (n_before < 1) throw std::invalid_argument("detection_delay: need at least one pre-change observation");
  const double n = static_cast<double>(n_before);
  const double c_limit =
      std::numbers::sqrt2 / 2.0 * std::sqrt((1.0 + 1.0 / n) / n * std::log(2.0 * std::sqrt(n + 1.0) / delta));
  if (gap <= c_limit) return {DelayResult::Status::Undetectable, 0};

  const std::int64_t nu = n_before + 1;
  for (std::int64_t d = 1; d <= cap; ++d) {
    const double dd = static_cast<double>(d);
    const double c = confidence_radius(n, dd, n + dd, delta);
    if (gap <= c) continue;
    const double a = delay_offset(n, dd) - eta.log_value(1, nu, nu + d - 1);
    const double den = 2.0 * n * (gap - c) * (gap - c) - a;
    if (den <= 0.0) continue;
    if (dd > n * a / den) return {DelayResult::Status::Found, d};
  }
  return {DelayResult::Status::CapExceeded, 0};
}

double false_alarm_eta_threshold(std::int64_t r, std::int64_t s, std::int64_t t, double delta, double alpha) {
  if (!(alpha > 1.0)) throw std::invalid_argument("false_alarm_eta_threshold: alpha must exceed 1");
  if (!(r < s && s <= t)) throw std::invalid_argument("false_alarm_eta_threshold: need r < s <= t");
  const double n1 = static_cast<double>(s - r);
  const double n2 = static_cast<double>(t - s + 1);
  const double n = static_cast<double>(t - r + 1);
  if (n1 == 1.0 || n2 == 1.0) return kInf;
  const double la = std::log(alpha);
  const double ln = std::log(n);
  const double inner = std::numbers::ln2 * la * la * la * la * delta * delta /
                       (4.0 * n * ln * ln * std::log(alpha * n1) * std::log(n1) * std::log(alpha * n2) * std::log(n2));
  return std::sqrt(n1 * n2) / (10.0 * (n + 1.0)) * std::pow(inner, alpha);
}

double false_alarm_eta_threshold_min(std::int64_t n, double delta, double alpha) {
  double best = kInf;
  for (std::int64_t t = 3; t <= n; ++t)
    for (std::int64_t s = 2; s <= t; ++s) best = std::min(best, false_alarm_eta_threshold(1, s, t, delta, alpha));
  return best;
}

// ---- regret -----------------------------------------------------------------

std::vector<SegmentGaps> segment_gaps(const EnvironmentSpec& env) {
  std::vector<SegmentGaps> out;
  for (const Segment& seg : env.segments()) {
    std::vector<double> mu = seg.means;
    std::sort(mu.begin(), mu.end(), std::greater<>());
    SegmentGaps g;
    g.max_gap = mu.front() - mu.back();
    g.min_gap = mu.size() > 1 ? mu[0] - mu[1] : 0.0;
    out.push_back(g);
  }
  return out;
}

double segment_ucb_term(const BoundInputs& in, const SegmentGaps& g) {
  if (g.max_gap <= 0.0) return 0.0;
  if (g.min_gap <= 0.0) return kInf;
  const double pulls = std::ceil(8.0 * in.xi * std::log(static_cast<double>(in.horizon)) / (g.min_gap * g.min_gap));
  return g.max_gap * (in.arms * pulls + in.arms * (1.0 + std::numbers::pi * std::numbers::pi / 3.0));
}

double regret_upper_bound(const BoundInputs& in) {
  double total = 0.0;
  double gap_max = 0.0;
  for (const auto& g : in.gaps) {
    total += segment_ucb_term(in, g);
    gap_max = std::max(gap_max, g.max_gap);
  }
  const double N = static_cast<double>(in.gaps.size());
  const double T = static_cast<double>(in.horizon);
  return total + gap_max * T * (in.p + 2.0 * in.arms * N * in.sigma + in.arms * in.delta);
}

double stationary_regret_bound(const BoundInputs& in) {
  if (in.gaps.empty()) throw std::invalid_argument("stationary_regret_bound: no segment");
  const SegmentGaps& g = in.gaps.front();
  const double T = static_cast<double>(in.horizon);
  return segment_ucb_term(in, g) + g.max_gap * (in.arms * in.sigma * T + in.p * T);
}

double corollary_regret_bound(const BoundInputs& in, int degree) {
  BoundInputs c = in;
  const double T = static_cast<double>(in.horizon);
  c.delta = 1.0 / T;
  c.p = std::sqrt(in.arms * std::log(T) / T);
  c.sigma = degree >= 1 ? coop_false_alarm(degree, c.delta) : c.delta;
  return regret_upper_bound(c);
}

double group_regret_bound(const BoundInputs& in, const std::vector<int>& degrees) {
  double total = 0.0;
  for (int deg : degrees) {
    BoundInputs k = in;
    k.sigma = deg >= 1 ? coop_false_alarm(deg, in.delta) : in.delta;
    total += regret_upper_bound(k);
  }
  return total;
}

// ---- detectability ----------------------------------------------------------

bool detectable(const DelayFunction& delay, double gap, double eps, double l_prev, double l_next) {
  if (std::isinf(l_next)) return true;
  if (!(gap > 0.0)) return false;
  const auto n_before = static_cast<std::int64_t>(std::floor((1.0 - eps) * l_prev - 1.0));
  if (n_before < 1) return false;
  const auto d = delay(gap, n_before);
  return d && static_cast<double>(*d) < l_next;
}

std::vector<double> change_gaps(const EnvironmentSpec& env) {
  std::vector<double> out;
  const auto& segs = env.segments();
  for (std::size_t n = 1; n < segs.size(); ++n) {
    double g = 0.0;
    for (std::size_t m = 0; m < segs[n].means.size(); ++m)
      g = std::max(g, std::abs(segs[n].means[m] - segs[n - 1].means[m]));
    out.push_back(g);
  }
  return out;
}

namespace {

double segment_length(const EnvironmentSpec& env, std::size_t n) {
  const auto& segs = env.segments();
  const std::int64_t end = n + 1 < segs.size() ? segs[n + 1].start : env.horizon() + 1;
  return static_cast<double>(end - segs[n].start);
}

}  // namespace

std::vector<bool> detectability_check(const EnvironmentSpec& env, double eps, const DelayFunction& delay) {
  std::vector<bool> out;
  const auto gaps = change_gaps(env);
  for (std::size_t n = 1; n < env.segments().size(); ++n)
    out.push_back(detectable(delay, gaps[n - 1], eps, segment_length(env, n - 1), segment_length(env, n)));
  return out;
}

std::vector<std::string> delay_assumption_warnings(const EnvironmentSpec& env, double p, double delta,
                                                   const HazardSchedule& eta) {
  std::vector<std::string> warnings;
  if (!(p > 0.0)) {
    warnings.emplace_back("delay assumption: no forced exploration (p = 0), d_n is unbounded");
    return warnings;
  }
  const auto& segs = env.segments();
  const auto gaps = change_gaps(env);
  const double cycle = env.arms() / p;
  double d_prev = 0.0;
  for (std::size_t n = 1; n < segs.size(); ++n) {
    const double r = static_cast<double>(segs[n - 1].start) + d_prev;
    const auto n_before = static_cast<std::int64_t>(static_cast<double>(segs[n].start) - r);
    double d_n = kInf;
    if (n_before >= 1 && gaps[n - 1] > 0.0) {
      const auto res = detection_delay(gaps[n - 1], n_before, delta, eta);
      if (res.found()) d_n = std::ceil(cycle * static_cast<double>(res.delay) + cycle);
    }
    const double need = 2.0 * std::max(d_n, d_prev);
    for (std::size_t side : {n - 1, n}) {
      const double len = segment_length(env, side);
      if (len < need)
        warnings.push_back(fmt::format("delay assumption: segment {} has length {} < 2 max(d_{}, d_{}) = {}",
                                       side + 1, len, n + 1, n, need));
    }
    d_prev = d_n;
    if (std::isinf(d_n)) break;
  }
  return warnings;
}

}  // namespace rbocoop
