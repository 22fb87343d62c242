#pragma once

// Majority-vote restarts over a restart-memory window.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rbocoop {

/// How many closed-neighbourhood detectors must agree.
///   CeilHalfDegree: count ≥ max(1, ⌈η_k/2⌉).
///   StrictMajority: count > (η_k + 1)/2, i.e. more than half of 𝒩_k.
enum class VoteRule { CeilHalfDegree, StrictMajority };

std::string to_string(VoteRule rule);
VoteRule parse_vote_rule(const std::string& s);

/// Votes needed for an agent of degree η_k. Degree 0 (a singleton
/// neighbourhood) needs exactly one vote under either rule.
int vote_threshold(VoteRule rule, int degree);

struct DetectionEvent {
  int agent = 0;
  int arm = 0;
  std::int64_t step = 0;       ///< wall-clock step of the alarm
  std::int64_t obs_index = 0;  ///< N^{agent,arm} when the detector fired

  friend bool operator==(const DetectionEvent&, const DetectionEvent&) = default;
};

/// Per (agent, arm) event lists, time ordered. Window lengths are wall-clock
/// steps: since observations never decrease in t, the observation-count
/// window N_{t−d}..N_t and the step window (t−d, t] select the same events.
class DetectionLog {
 public:
  /// `window` is the restart memory d (≥ 1).
  DetectionLog(int agents, int arms, std::int64_t window);

  void record(int agent, int arm, std::int64_t step, std::int64_t obs_index);
  void record(const DetectionEvent& e) { record(e.agent, e.arm, e.step, e.obs_index); }

  /// Drops events that can no longer fall in any window at steps ≥ t.
  void prune(std::int64_t t);

  /// Some event of (agent, arm) has step in (after, upto].
  bool has_event(int agent, int arm, std::int64_t after, std::int64_t upto) const;

  const std::vector<DetectionEvent>& events(int agent, int arm) const;
  std::size_t size() const;

  int agents() const noexcept { return agents_; }
  int arms() const noexcept { return arms_; }
  std::int64_t window() const noexcept { return window_; }

 private:
  std::size_t slot(int agent, int arm) const;

  int agents_;
  int arms_;
  std::int64_t window_;
  std::vector<std::vector<DetectionEvent>> events_;
};

/// Counts j ∈ `neighborhood` with an event on `arm` stamped in
/// (max(t − d, since), t]; true iff the count reaches `threshold`.
/// `since` is the voter's last restart τ^k, so events it already acted on
/// are not counted twice.
bool vote_restart(const DetectionLog& log, std::span<const int> neighborhood, int threshold, int arm,
                  std::int64_t t, std::int64_t since);

/// Agents whose vote passes on any arm at step t. All votes read the same
/// log and the same `last_restart` snapshot, so the result does not depend
/// on evaluation order. Returned ascending.
std::vector<int> apply_votes(const DetectionLog& log, const std::vector<std::vector<int>>& neighborhoods,
                             std::span<const int> thresholds, std::span<const std::int64_t> last_restart,
                             std::int64_t t);

}  // namespace rbocoop
