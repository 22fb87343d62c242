#pragma once

// Numeric evaluators of the false-alarm, delay and regret guarantees.
// All functions are pure.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rbocoop/env.hpp"
#include "rbocoop/rbocpd.hpp"

namespace rbocoop {

/// σ = Σ_{j=⌈η/2⌉}^{η} C(η,j) δ^j (1−δ)^{η−j}. `degree` ≥ 1, δ ∈ [0,1].
double coop_false_alarm(int degree, double delta);

/// 𝒞 = (√2/2)( sqrt((1+1/n1)/n1 · log(2 sqrt(n1+1)/δ))
///            + sqrt((1+1/n2)/n2 · log(2 n sqrt(n2+1) log²(n) / (log 2 · δ))) )
/// with n1 = n_{r:s−1}, n2 = n_{s:t}, n = n_{r:t}.
double confidence_radius(double n1, double n2, double n_total, double delta);

/// f_{r,s,t} = log n_{r:s} + log n_{s:t+1} − ½ log n_{r:t} + 9/8, in the
/// change-point layout s = ν (n1 = n_{r:ν−1} observations before, d after):
/// log(n1+1) + log(d+1) − ½ log(n1+d) + 9/8.
double delay_offset(double n_before, double d);

/// Δ_{r,s,t} for a change at ν: factor n_{r:ν−1}/n_{r:s−1} when ν ≤ s ≤ t,
/// n_{ν:t}/n_{s:t} when s < ν. Steps are 1-based, r ≤ s ≤ t.
double relative_gap(std::int64_t r, std::int64_t nu, std::int64_t s, std::int64_t t, double gap);

struct DelayResult {
  enum class Status { Found, Undetectable, CapExceeded };
  Status status = Status::CapExceeded;
  std::int64_t delay = 0;  ///< valid when status == Found

  bool found() const noexcept { return status == Status::Found; }
};

std::string to_string(DelayResult::Status s);

/// Smallest d ≥ 1 with Δ > 𝒞, 2n(Δ−𝒞)² − A > 0 and d > nA / (2n(Δ−𝒞)² − A),
/// where A = f − log η, 𝒞 = confidence_radius(n, d, n+d, δ) and η is read
/// at (r, ν, ν+d−1) with r = 1, ν = n+1. Undetectable when Δ does not exceed
/// the d → ∞ limit of 𝒞.
DelayResult detection_delay(double gap, std::int64_t n_before, double delta, const HazardSchedule& eta,
                            std::int64_t cap = 1'000'000);

/// exp(−2 n (Δ − 𝒞)² + f) at s = ν, t = ν + d − 1: the hazard must exceed
/// this for the delay bound to hold.
double delay_eta_lower_bound(double gap, std::int64_t n_before, std::int64_t d, double delta);

/// Right-hand side of the false-alarm condition on η_{r,s,t} (α > 1,
/// r < s ≤ t). +∞ when n_{r:s−1} = 1 or n_{s:t} = 1 (a log factor vanishes).
double false_alarm_eta_threshold(std::int64_t r, std::int64_t s, std::int64_t t, double delta, double alpha);

/// Minimum of false_alarm_eta_threshold over t ∈ [1, n], s ∈ (1, t]
/// with r = 1: a constant η below it certifies δ on a run of n observations.
double false_alarm_eta_threshold_min(std::int64_t n, double delta, double alpha);

// ---- regret ---------------------------------------------------------------

/// Δ_i^* (best minus worst mean) and Δ_i^min (best minus runner-up) of one
/// segment. Δ^min is 0 on ties at the top.
struct SegmentGaps {
  double max_gap = 0.0;
  double min_gap = 0.0;
};
std::vector<SegmentGaps> segment_gaps(const EnvironmentSpec& env);

struct BoundInputs {
  std::int64_t horizon = 1;
  int arms = 1;
  std::vector<SegmentGaps> gaps;  ///< one per segment; N = gaps.size()
  double p = 0.0;
  double delta = 0.0;
  double sigma = 0.0;
  double xi = 1.0;  ///< multiplies 8 log T; 1 gives the theorem's literal form
};

/// C̃_i = Δ_i^*[M⌈8ξ log T/(Δ_i^min)²⌉ + M(1 + π²/3)].
double segment_ucb_term(const BoundInputs& in, const SegmentGaps& g);

/// Per-agent bound Σ_i C̃_i + Δ^max T (p + 2MNσ + Mδ), Δ^max = max_i Δ_i^*.
/// +∞ when some Δ_i^min is 0.
double regret_upper_bound(const BoundInputs& in);

/// Stationary form Δ_1^*[MσT + pT + M⌈8ξ log T/(Δ_1^min)²⌉ + M(1+π²/3)];
/// uses gaps[0].
double stationary_regret_bound(const BoundInputs& in);

/// The bound with δ = 1/T, p = sqrt(M log T / T) substituted (σ recomputed
/// from `degree`).
double corollary_regret_bound(const BoundInputs& in, int degree);

/// Σ_k of regret_upper_bound with σ_k = coop_false_alarm(η_k, δ); agents of
/// degree 0 use σ = δ.
double group_regret_bound(const BoundInputs& in, const std::vector<int>& degrees);

// ---- detectability --------------------------------------------------------

/// Delay bound as a function of (gap, observations before the change).
using DelayFunction = std::function<std::optional<std::int64_t>(double gap, std::int64_t n_before)>;

/// 𝒟_{Δ, ν_{n−1}+1+ε l_{n−1}, ν_n} < l_n. `l_next` may be +∞.
bool detectable(const DelayFunction& delay, double gap, double eps, double l_prev, double l_next);

/// Largest single-arm mean shift at each change point n ≥ 2.
std::vector<double> change_gaps(const EnvironmentSpec& env);

/// One result per change point, treating every step as one observation.
std::vector<bool> detectability_check(const EnvironmentSpec& env, double eps, const DelayFunction& delay);

/// The d_n recursion of the delay assumption with observation counts taken
/// as wall-clock steps. Returns readable warnings where a segment is
/// shorter than 2 max(d_n, d_{n−1}); never throws on violations.
std::vector<std::string> delay_assumption_warnings(const EnvironmentSpec& env, double p, double delta,
                                                   const HazardSchedule& eta);

}  // namespace rbocoop
