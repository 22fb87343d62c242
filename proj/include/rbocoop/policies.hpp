#pragma once

// Bandit policies behind one per-agent interface: select an arm, observe
// (own and shared) rewards, restart.

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rbocoop/cooperation.hpp"
#include "rbocoop/env.hpp"

namespace rbocoop {

enum class PolicyKind {
  RBOCoopUCB,
  RBOUCB,
  GLRCoopUCB,
  GLRUCB,
  MUCB,
  MCoopUCB,
  UCB,
  DUCB,
  SWUCB,
  DCoopUCB,
  SWCoopUCB,
  EXP3,
};

enum class DetectorKind { None, Rbo, Glr, Window };
enum class StatsKind { Plain, Discounted, Sliding };

std::string to_string(PolicyKind kind);
/// Accepts the names printed by to_string ("rbo-coop-ucb", "d-ucb", ...).
PolicyKind parse_policy_kind(const std::string& name);
const std::vector<PolicyKind>& all_policy_kinds();

bool is_cooperative(PolicyKind kind);
DetectorKind detector_of(PolicyKind kind);
StatsKind stats_of(PolicyKind kind);

/// Optional overrides; anything unset takes the default for the policy and
/// environment (see resolve_params).
struct Hyperparameters {
  std::optional<double> xi;
  std::optional<double> p;                ///< forced-exploration rate
  std::optional<double> eta;              ///< RBOCPD hazard
  std::optional<bool> detector;           ///< false disables the change detector
  std::optional<double> glr_delta;
  std::optional<int> glr_stride;
  std::optional<int> mucb_window;
  std::optional<double> mucb_threshold;
  std::optional<double> mucb_gamma;       ///< M-UCB forced-exploration rate
  std::optional<double> discount;         ///< D-UCB γ
  std::optional<std::int64_t> sliding_window;
  std::optional<double> exp3_gamma;
  std::optional<VoteRule> vote_rule;
  std::optional<std::int64_t> memory_window;  ///< restart memory d

  /// Fields set in `over` replace those of *this.
  Hyperparameters merged(const Hyperparameters& over) const;

  friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

Hyperparameters hyperparameters_from_json(const nlohmann::json& j);
nlohmann::json hyperparameters_to_json(const Hyperparameters& h);

/// Fully resolved parameters of one policy on one environment.
struct PolicyParams {
  PolicyKind kind = PolicyKind::RBOCoopUCB;
  int arms = 1;
  std::int64_t horizon = 1;
  int segments = 1;
  double xi = 1.0;
  double p = 0.0;  ///< 0 disables forced exploration
  DetectorKind detector = DetectorKind::None;
  double eta = 0.0;
  double glr_delta = 0.0;
  int glr_stride = 1;
  int mucb_window = 0;
  double mucb_threshold = 0.0;
  double discount = 1.0;
  std::int64_t sliding_window = 0;
  double exp3_gamma = 0.0;
  bool cooperative = false;
  VoteRule vote_rule = VoteRule::CeilHalfDegree;
  std::int64_t memory_window = 1;

  nlohmann::json to_json() const;
};

/// Defaults, with T, M and the true segment count N taken from `env`:
///   RBO:   η = 10/T, p = sqrt(log T / T)
///   GLR:   δ = 10/T, p = sqrt(log T / T)
///   M-UCB: ω = 800, b = sqrt(ω log(2MT²)/2), γ = 0.05 sqrt((N−1)(2b+3√ω)/(2T))
///   D-UCB: γ = 1 − sqrt(N/T)/4
///   SW:    τ = 2 sqrt(T log T / N)
///   EXP3:  γ = min(1, sqrt(M ln M / ((e−1) T)))
///   UCB and the passive baselines use no forced exploration; ξ = 1.
///   d = 2⌊M/p⌋ when p > 0, else 2M.
/// Throws ConfigError naming the offending field.
PolicyParams resolve_params(PolicyKind kind, const Hyperparameters& hyper, const EnvironmentSpec& env);

/// Validation used by resolve_params; exposed for tests.
void validate_params(const PolicyParams& params);

/// Eq. (16): q = (t − τ) mod ⌊M/p⌋; arm q − 1 (0-based) when 1 ≤ q ≤ M.
/// p = 0 means no forced exploration.
std::optional<int> forced_exploration_arm(std::int64_t t, std::int64_t tau, int arms, double p);

/// S/N + sqrt(ξ(α+1) log(clock) / N); +∞ when N = 0; log clamped at 0.
double ucb_index(double n, double s, double clock, double xi, double alpha);

/// Per-agent policy state. Single writer.
class AgentPolicy {
 public:
  virtual ~AgentPolicy() = default;

  /// Arm to play at step t (0-based).
  virtual int select(std::int64_t t) = 0;

  /// One observation of `arm`, own or shared. Returns true when the arm's
  /// change detector fired on it; the detector then restarts on its own.
  virtual bool observe(int arm, double x, std::int64_t t) = 0;

  /// Called once per step after all observations of that step.
  virtual void end_step(std::int64_t /*t*/) {}

  /// τ^k = t; statistics and detectors cleared.
  virtual void restart(std::int64_t t) = 0;

  virtual std::int64_t last_restart() const = 0;
  /// N^{k,m} (discounted or windowed where the policy is).
  virtual double count(int arm) const = 0;
  virtual double reward_sum(int arm) const = 0;
  /// Current index of each arm at step t (empty for EXP3).
  virtual std::vector<double> indices(std::int64_t t) const { (void)t; return {}; }
  /// EXP3 sampling distribution (empty for index policies).
  virtual std::vector<double> probabilities() const { return {}; }

  int arms() const noexcept { return arms_; }

 protected:
  explicit AgentPolicy(int arms) : arms_(arms) {}
  int arms_;
};

/// Seed of agent k's private RNG (tie-breaking, EXP3 draws) in a
/// replication with seed `replication_seed`.
std::uint64_t agent_seed(std::uint64_t replication_seed, int agent);

/// `alpha` is the agent's exploration offset α^k (0 for non-cooperative use).
std::unique_ptr<AgentPolicy> make_agent(const PolicyParams& params, double alpha, std::uint64_t seed);

/// argmax with uniform tie-breaking; draws from `gen` only on ties.
template <class Gen>
int argmax_random_tie(const std::vector<double>& v, Gen& gen) {
  int best = 0;
  int ties = 1;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (v[ui] > v[static_cast<std::size_t>(best)]) {
      best = i;
      ties = 1;
    } else if (v[ui] == v[static_cast<std::size_t>(best)]) {
      ++ties;
    }
  }
  if (ties == 1) return best;
  const double top = v[static_cast<std::size_t>(best)];
  auto pick = static_cast<int>(uniform_index(gen, static_cast<std::size_t>(ties)));
  for (int i = 0; i < static_cast<int>(v.size()); ++i)
    if (v[static_cast<std::size_t>(i)] == top && pick-- == 0) return i;
  return best;
}

}  // namespace rbocoop
