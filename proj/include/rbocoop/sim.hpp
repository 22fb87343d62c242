#pragma once

// The synchronous multi-agent loop, regret accounting, change-point metrics
// and replication.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rbocoop/cooperation.hpp"
#include "rbocoop/env.hpp"
#include "rbocoop/network.hpp"
#include "rbocoop/policies.hpp"

namespace rbocoop {

struct RunConfig {
  EnvironmentSpec env;
  Network network;
  PolicyKind policy = PolicyKind::RBOCoopUCB;
  Hyperparameters hyper{};
  std::uint64_t seed = 1;
  int replications = 1;
  AssumptionMode assumption = AssumptionMode::Strict;
  /// Window for matching detections to change points; default is half the
  /// shortest segment.
  std::optional<std::int64_t> matching_window{};
};

struct RestartEvent {
  int agent = 0;
  std::int64_t step = 0;

  friend bool operator==(const RestartEvent&, const RestartEvent&) = default;
};

/// Observation bookkeeping of one agent over a run.
struct AgentCounts {
  std::int64_t received = 0;   ///< observations fed to the agent (Σ_t |𝒩_k|)
  std::int64_t discarded = 0;  ///< Σ_m N^{k,m} dropped by restarts
  std::int64_t final_total = 0;  ///< Σ_m N^{k,m} at the end of the run
};

struct RunTrace {
  int replication = 0;  ///< 0-based
  std::uint64_t seed = 0;
  PolicyKind policy = PolicyKind::RBOCoopUCB;
  int agents = 0;
  int arms = 0;
  std::int64_t horizon = 0;

  // Step-major: entry (t−1)·K + k.
  std::vector<int> actions;
  std::vector<double> rewards;
  std::vector<double> chosen_means;
  std::vector<double> oracle_means;  ///< μ_t^*, one per step
  std::vector<double> cum_regret;    ///< group pseudo-regret R_t, one per step
  std::vector<double> agent_regret;  ///< final R_T^k per agent

  std::vector<DetectionEvent> detections;  ///< raw detector alarms
  std::vector<RestartEvent> restarts;      ///< restarts that took effect
  std::vector<AgentCounts> counts;

  int action(std::int64_t t, int k) const { return actions[index(t, k)]; }
  double reward(std::int64_t t, int k) const { return rewards[index(t, k)]; }
  double final_regret() const { return cum_regret.empty() ? 0.0 : cum_regret.back(); }

 private:
  std::size_t index(std::int64_t t, int k) const {
    return static_cast<std::size_t>(t - 1) * static_cast<std::size_t>(agents) + static_cast<std::size_t>(k);
  }
};

/// Seed of replication `r` (0-based) under master seed `seed`.
std::uint64_t replication_seed(std::uint64_t seed, int r);

/// Per-(agent, step, arm) reward draw: the same on every policy for the
/// same replication seed.
double draw_reward(const EnvironmentSpec& env, std::uint64_t rep_seed, int agent, std::int64_t t, int arm);

/// Network checks for the policy; returns warnings (permissive mode) and
/// throws ConfigError on hard violations.
std::vector<std::string> check_network(const RunConfig& config);

RunTrace run_single(const RunConfig& config, int replication);

/// R_t for t = 1..T (the trace already holds it; recomputed from the
/// recorded chosen and oracle means).
std::vector<double> group_regret(const RunTrace& trace);

struct CpdMetrics {
  std::int64_t correct = 0;
  std::int64_t possible = 0;  ///< K · (N − 1) per trace
  std::int64_t false_alarms = 0;
  std::int64_t events = 0;
  double delay_sum = 0.0;
  std::int64_t agent_steps = 0;  ///< K · T per trace

  std::optional<double> mean_delay() const;
  /// false alarms / (K·T), in percent.
  double false_alarm_rate() const;
  CpdMetrics& operator+=(const CpdMetrics& o);
};

enum class EventSource { Restart, Detection };

/// Classifies events: an agent's first event at or after ν_n (n ≥ 2) is a
/// correct detection when it falls in [ν_n, min(ν_n + window, ν_{n+1}));
/// every other event is a false alarm. Detection-source events of several
/// arms at one step count separately.
CpdMetrics cpd_metrics(const RunTrace& trace, const EnvironmentSpec& env, std::int64_t matching_window,
                       EventSource source = EventSource::Restart);

std::int64_t default_matching_window(const EnvironmentSpec& env);

struct ReplicationResult {
  PolicyParams params;
  std::vector<std::string> warnings;
  std::vector<RunTrace> traces;
  std::vector<double> mean_regret;  ///< per step
  std::vector<double> std_regret;   ///< per step, sample standard deviation
  std::vector<double> final_regrets;
  double final_mean = 0.0;
  double final_std = 0.0;
  std::int64_t matching_window = 0;
  CpdMetrics restarts;    ///< metrics of restart events
  CpdMetrics detections;  ///< metrics of raw detector alarms
};

/// Runs config.replications independent replications on up to `jobs`
/// threads (0 = hardware concurrency). Results do not depend on `jobs`.
ReplicationResult replicate(const RunConfig& config, unsigned jobs = 1);

/// Sample mean and standard deviation (n − 1 denominator, 0 for n = 1).
std::pair<double, double> mean_std(const std::vector<double>& xs);

}  // namespace rbocoop
