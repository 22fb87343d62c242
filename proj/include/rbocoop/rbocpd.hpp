#pragma once

// Restarted Bayesian online change point detection on a single [0,1]
// observation stream.
//
// Forecaster s is the hypothesis "the current run started at observation s".
// Its weight θ_{r,s,t} evolves multiplicatively with its Laplace-predictor
// loss; a restart is signalled as soon as some forecaster launched after the
// run start r outweighs the run-start forecaster. Weights live in the log
// domain: a few hundred observations underflow the linear domain.
//
// All indices r, s, t are observation ordinals within the stream, never
// wall-clock steps.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace rbocoop {

/// Laplace predictor Lp(x | history) for x ∈ {0,1}, where the history has
/// `n` observations summing to `sum`. Empty history predicts 1/2.
double laplace_predict(double sum, double n, double x);

/// −x log Lp(1|·) − (1−x) log Lp(0|·). Bilinear in x, so x ∈ [0,1] is
/// accepted (bounded rewards feed the detector unmodified).
double forecaster_loss(double sum, double n, double x);

/// The hyperparameter η_{r,s,t}, evaluated lazily.
class HazardSchedule {
 public:
  enum class Kind { Constant, InverseRunLength, Custom };
  using Fn = std::function<double(std::int64_t r, std::int64_t s, std::int64_t t)>;

  static HazardSchedule constant(double eta);
  /// η_{r,s,t} = scale / n_{r:t}.
  static HazardSchedule inverse_run_length(double scale = 1.0);
  static HazardSchedule custom(Fn fn);

  double operator()(std::int64_t r, std::int64_t s, std::int64_t t) const;
  double log_value(std::int64_t r, std::int64_t s, std::int64_t t) const;

  Kind kind() const noexcept { return kind_; }
  bool is_constant() const noexcept { return kind_ == Kind::Constant; }
  /// The constant value, or the scale for InverseRunLength.
  double value() const noexcept { return value_; }

 private:
  HazardSchedule(Kind kind, double value, Fn fn) : kind_(kind), value_(value), fn_(std::move(fn)) {}

  Kind kind_;
  double value_;
  Fn fn_;
};

/// One detector instance. Single writer: exactly one stream feeds it.
class ForecasterBank {
 public:
  explicit ForecasterBank(HazardSchedule eta, bool retain_stream = false, std::int64_t run_start = 1);

  /// Adds observation t = last_index() + 1 with value x ∈ [0,1]: updates
  /// every forecaster's weight with its loss on x, spawns forecaster s = t,
  /// then re-evaluates the restart test.
  void ingest(double x);

  /// True iff some forecaster s ∈ (r, t] has θ_{r,s,t} > θ_{r,r,t}.
  bool restart_check() const noexcept { return restart_; }

  /// Drops every forecaster; the next observation gets ordinal `new_run_start`.
  void reset(std::int64_t new_run_start);
  /// Same, continuing the ordinal count of the stream.
  void reset() { reset(t_ + 1); }

  /// Number of live forecasters (t − r + 1 once non-empty).
  std::size_t size() const noexcept { return log_w_.size(); }
  bool empty() const noexcept { return log_w_.empty(); }
  std::int64_t run_start() const noexcept { return r_; }
  /// Ordinal of the most recent observation (run_start() − 1 when empty).
  std::int64_t last_index() const noexcept { return t_; }

  /// log θ_{r,s,t} for s = r, r+1, ..., t.
  std::span<const double> log_weights() const noexcept { return log_w_; }
  /// Σ x_{s:t} per forecaster.
  std::span<const double> history_sums() const noexcept { return sum_; }
  /// θ/Σθ: the run-length posterior.
  std::vector<double> normalized_weights() const;
  /// L̂_{r:t}: cumulative loss of the run-start forecaster.
  double cumulative_loss() const noexcept { return loss_hat_; }

  const HazardSchedule& hazard() const noexcept { return eta_; }

  /// Observations of the current run; only kept when constructed with
  /// retain_stream = true.
  std::span<const double> retained_stream() const noexcept { return stream_; }
  /// Recomputes per-forecaster sums from the retained stream. Always true
  /// when the stream is not retained.
  bool audit() const;

  nlohmann::json snapshot() const;

  /// The restart test on a vector of same-step log-weights (index 0 = r).
  static bool restart_test(std::span<const double> log_weights) noexcept;

 private:
  HazardSchedule eta_;
  bool retain_;
  std::int64_t r_;
  std::int64_t t_;
  std::vector<double> log_w_;
  std::vector<double> sum_;
  std::vector<double> log_eta_prev_;  // only used by non-constant schedules
  std::vector<double> stream_;
  double loss_hat_ = 0.0;
  bool binary_ = true;
  bool restart_ = false;
};

/// Offline replay: feeds x_1..x_t through a fresh bank and returns the
/// 1-based index of the first observation at which the restart test fires.
std::optional<std::int64_t> run_offline(std::span<const double> xs, const HazardSchedule& eta);

}  // namespace rbocoop
