#include "rbocoop/trace_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "rbocoop/error.hpp"

namespace rbocoop {

using nlohmann::json;

namespace {

constexpr const char* kTraceHeader = "replication,t,agent,arm,reward,oracle_mean,chosen_mean,cum_group_regret";
constexpr const char* kEventsHeader = "replication,t,agent,kind,arm,obs_index";

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
T parse_field(std::string_view s, std::size_t line, const char* name) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(line, fmt::format("{}: cannot parse \"{}\"", name, s));
  return v;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

void write_trace_csv(std::ostream& out, const std::vector<RunTrace>& traces) {
  out << kTraceHeader << '\n';
  std::string buf;
  for (const RunTrace& tr : traces) {
    for (std::int64_t t = 1; t <= tr.horizon; ++t) {
      const auto ts = static_cast<std::size_t>(t - 1);
      for (int k = 0; k < tr.agents; ++k) {
        const std::size_t cell = ts * static_cast<std::size_t>(tr.agents) + static_cast<std::size_t>(k);
        buf.clear();
        fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{},{},{}\n", tr.replication + 1, t, k + 1,
                       tr.actions[cell] + 1, tr.rewards[cell], tr.oracle_means[ts], tr.chosen_means[cell],
                       tr.cum_regret[ts]);
        out << buf;
      }
    }
  }
}

void write_events_csv(std::ostream& out, const std::vector<RunTrace>& traces) {
  out << kEventsHeader << '\n';
  for (const RunTrace& tr : traces) {
    // Detections and restarts of one step: detections first (they cause
    // the restarts).
    std::size_t d = 0;
    std::size_t r = 0;
    while (d < tr.detections.size() || r < tr.restarts.size()) {
      const bool take_det =
          r == tr.restarts.size() || (d < tr.detections.size() && tr.detections[d].step <= tr.restarts[r].step);
      if (take_det) {
        const auto& e = tr.detections[d++];
        out << fmt::format("{},{},{},detection,{},{}\n", tr.replication + 1, e.step, e.agent + 1, e.arm + 1,
                           e.obs_index);
      } else {
        const auto& e = tr.restarts[r++];
        out << fmt::format("{},{},{},restart,,\n", tr.replication + 1, e.step, e.agent + 1);
      }
    }
  }
}

void write_regret_csv(std::ostream& out, const ReplicationResult& result) {
  out << "t,mean,std\n";
  for (std::size_t t = 0; t < result.mean_regret.size(); ++t)
    out << fmt::format("{},{},{}\n", t + 1, result.mean_regret[t], result.std_regret[t]);
}

json cpd_to_json(const CpdMetrics& m) {
  json j = {{"correct", m.correct},           {"possible", m.possible},
            {"events", m.events},             {"false_alarms", m.false_alarms},
            {"agent_steps", m.agent_steps},   {"false_alarm_rate_percent", m.false_alarm_rate()}};
  if (auto d = m.mean_delay()) j["mean_delay"] = *d;
  else j["mean_delay"] = nullptr;
  return j;
}

json summary_json(const std::vector<ReplicationResult>& results, const json& config) {
  json policies = json::object();
  for (const auto& r : results) {
    json restarts_per_rep = json::array();
    for (const auto& tr : r.traces) restarts_per_rep.push_back(tr.restarts.size());
    policies[to_string(r.params.kind)] = {
        {"params", r.params.to_json()},
        {"replications", r.traces.size()},
        {"final_regret_mean", r.final_mean},
        {"final_regret_std", r.final_std},
        {"final_regrets", r.final_regrets},
        {"matching_window", r.matching_window},
        {"restart_metrics", cpd_to_json(r.restarts)},
        {"detection_metrics", cpd_to_json(r.detections)},
        {"restarts_per_replication", restarts_per_rep},
        {"warnings", r.warnings},
    };
  }
  json j = {{"schema_version", kTraceSchemaVersion}, {"policies", policies}};
  if (!config.is_null()) j["config"] = config;
  return j;
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "empty trace file");
  if (strip_cr(line) != kTraceHeader) throw ParseError(1, "unexpected trace header");
  std::vector<TraceRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 8) throw ParseError(lineno, fmt::format("expected 8 fields, got {}", f.size()));
    TraceRow r;
    r.replication = parse_field<int>(f[0], lineno, "replication");
    r.t = parse_field<std::int64_t>(f[1], lineno, "t");
    r.agent = parse_field<int>(f[2], lineno, "agent");
    r.arm = parse_field<int>(f[3], lineno, "arm");
    r.reward = parse_field<double>(f[4], lineno, "reward");
    r.oracle_mean = parse_field<double>(f[5], lineno, "oracle_mean");
    r.chosen_mean = parse_field<double>(f[6], lineno, "chosen_mean");
    r.cum_group_regret = parse_field<double>(f[7], lineno, "cum_group_regret");
    rows.push_back(r);
  }
  return rows;
}

std::vector<EventRow> read_events_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "empty events file");
  if (strip_cr(line) != kEventsHeader) throw ParseError(1, "unexpected events header");
  std::vector<EventRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 6) throw ParseError(lineno, fmt::format("expected 6 fields, got {}", f.size()));
    EventRow r;
    r.replication = parse_field<int>(f[0], lineno, "replication");
    r.t = parse_field<std::int64_t>(f[1], lineno, "t");
    r.agent = parse_field<int>(f[2], lineno, "agent");
    r.kind = std::string(f[3]);
    if (r.kind == "detection") {
      r.arm = parse_field<int>(f[4], lineno, "arm");
      r.obs_index = parse_field<std::int64_t>(f[5], lineno, "obs_index");
    } else if (r.kind != "restart") {
      throw ParseError(lineno, "kind: expected detection or restart");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::map<int, double> final_regrets(const std::vector<TraceRow>& rows) {
  std::map<int, std::pair<std::int64_t, double>> last;
  for (const auto& r : rows) {
    auto& slot = last[r.replication];
    if (r.t >= slot.first) slot = {r.t, r.cum_group_regret};
  }
  std::map<int, double> out;
  for (const auto& [rep, v] : last) out[rep] = v.second;
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace rbocoop
