#include "rbocoop/cooperation.hpp"

#include <algorithm>
#include <stdexcept>

#include "rbocoop/error.hpp"

namespace rbocoop {

std::string to_string(VoteRule rule) {
  return rule == VoteRule::CeilHalfDegree ? "ceil-half-degree" : "strict-majority";
}

VoteRule parse_vote_rule(const std::string& s) {
  if (s == "ceil-half-degree") return VoteRule::CeilHalfDegree;
  if (s == "strict-majority") return VoteRule::StrictMajority;
  throw ConfigError("vote_rule", "expected \"ceil-half-degree\" or \"strict-majority\", got \"" + s + "\"");
}

int vote_threshold(VoteRule rule, int degree) {
  if (degree < 0) throw std::invalid_argument("vote_threshold: negative degree");
  if (rule == VoteRule::CeilHalfDegree) return std::max(1, (degree + 1) / 2);
  return (degree + 1) / 2 + 1;
}

DetectionLog::DetectionLog(int agents, int arms, std::int64_t window)
    : agents_(agents), arms_(arms), window_(window),
      events_(static_cast<std::size_t>(agents) * static_cast<std::size_t>(arms)) {
  if (agents < 1 || arms < 1) throw std::invalid_argument("DetectionLog: empty shape");
  if (window < 1) throw ConfigError("memory_window", "must be at least 1 step");
}

std::size_t DetectionLog::slot(int agent, int arm) const {
  if (agent < 0 || agent >= agents_ || arm < 0 || arm >= arms_)
    throw std::out_of_range("DetectionLog: agent or arm out of range");
  return static_cast<std::size_t>(agent) * static_cast<std::size_t>(arms_) + static_cast<std::size_t>(arm);
}

void DetectionLog::record(int agent, int arm, std::int64_t step, std::int64_t obs_index) {
  auto& v = events_[slot(agent, arm)];
  if (!v.empty() && v.back().step > step) throw std::invalid_argument("DetectionLog: events must be time ordered");
  v.push_back({agent, arm, step, obs_index});
}

void DetectionLog::prune(std::int64_t t) {
  // At any step u ≥ t the window is (u − d, u], so stamps ≤ t − d never count.
  for (auto& v : events_) {
    auto keep = std::find_if(v.begin(), v.end(), [&](const DetectionEvent& e) { return e.step > t - window_; });
    v.erase(v.begin(), keep);
  }
}

bool DetectionLog::has_event(int agent, int arm, std::int64_t after, std::int64_t upto) const {
  const auto& v = events_[slot(agent, arm)];
  // Newest first: the lists are short and recent events are the usual hit.
  for (auto it = v.rbegin(); it != v.rend(); ++it) {
    if (it->step <= after) return false;
    if (it->step <= upto) return true;
  }
  return false;
}

const std::vector<DetectionEvent>& DetectionLog::events(int agent, int arm) const {
  return events_[slot(agent, arm)];
}

std::size_t DetectionLog::size() const {
  std::size_t n = 0;
  for (const auto& v : events_) n += v.size();
  return n;
}

bool vote_restart(const DetectionLog& log, std::span<const int> neighborhood, int threshold, int arm,
                  std::int64_t t, std::int64_t since) {
  const std::int64_t after = std::max(t - log.window(), since);
  int count = 0;
  for (int j : neighborhood) {
    if (log.has_event(j, arm, after, t) && ++count >= threshold) return true;
  }
  return false;
}

std::vector<int> apply_votes(const DetectionLog& log, const std::vector<std::vector<int>>& neighborhoods,
                             std::span<const int> thresholds, std::span<const std::int64_t> last_restart,
                             std::int64_t t) {
  std::vector<int> out;
  for (int k = 0; k < static_cast<int>(neighborhoods.size()); ++k) {
    const auto uk = static_cast<std::size_t>(k);
    for (int m = 0; m < log.arms(); ++m) {
      if (vote_restart(log, neighborhoods[uk], thresholds[uk], m, t, last_restart[uk])) {
        out.push_back(k);
        break;
      }
    }
  }
  return out;
}

}  // namespace rbocoop
