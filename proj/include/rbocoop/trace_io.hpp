#pragma once

// Trace export and parse-back. Agent, arm and replication indices are
// 1-based in every file; numbers are written in shortest round-trip form,
// so parsing a file reproduces the in-memory doubles exactly.
//
// trace CSV:   replication,t,agent,arm,reward,oracle_mean,chosen_mean,cum_group_regret
// events CSV:  replication,t,agent,kind,arm,obs_index   (kind = detection|restart;
//              restart rows leave arm and obs_index empty)
// regret CSV:  t,mean,std
// summary:     JSON, see summary_json

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rbocoop/sim.hpp"

namespace rbocoop {

inline constexpr int kTraceSchemaVersion = 1;

void write_trace_csv(std::ostream& out, const std::vector<RunTrace>& traces);
void write_events_csv(std::ostream& out, const std::vector<RunTrace>& traces);
void write_regret_csv(std::ostream& out, const ReplicationResult& result);

nlohmann::json cpd_to_json(const CpdMetrics& m);

/// {schema_version, policies: {name: {...}}, config?}. Results are keyed by
/// policy name.
nlohmann::json summary_json(const std::vector<ReplicationResult>& results, const nlohmann::json& config = nullptr);

struct TraceRow {
  int replication = 0;
  std::int64_t t = 0;
  int agent = 0;
  int arm = 0;
  double reward = 0.0;
  double oracle_mean = 0.0;
  double chosen_mean = 0.0;
  double cum_group_regret = 0.0;
};

/// Throws ParseError with the offending line on malformed input.
std::vector<TraceRow> read_trace_csv(std::istream& in);

struct EventRow {
  int replication = 0;
  std::int64_t t = 0;
  int agent = 0;
  std::string kind;
  int arm = 0;  ///< 0 for restart rows
  std::int64_t obs_index = 0;
};

std::vector<EventRow> read_events_csv(std::istream& in);

/// Final cumulative group regret per replication (1-based key).
std::map<int, double> final_regrets(const std::vector<TraceRow>& rows);

/// FNV-1a 64 of a byte string; used to compare exported artifacts.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace rbocoop
