#include "rbocoop/rbocpd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rbocoop/log_table.hpp"

namespace rbocoop {

double laplace_predict(double sum, double n, double x) {
  if (!detail::is_binary(x)) throw std::invalid_argument("laplace_predict: x must be 0 or 1");
  return x == 1.0 ? (sum + 1.0) / (n + 2.0) : (n - sum + 1.0) / (n + 2.0);
}

double forecaster_loss(double sum, double n, double x) {
  const double p1 = (sum + 1.0) / (n + 2.0);
  const double p0 = (n - sum + 1.0) / (n + 2.0);
  if (x == 1.0) return -std::log(p1);
  if (x == 0.0) return -std::log(p0);
  return -x * std::log(p1) - (1.0 - x) * std::log(p0);
}

// ---- HazardSchedule ---------------------------------------------------------

HazardSchedule HazardSchedule::constant(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("hazard: η must be positive and finite");
  return HazardSchedule(Kind::Constant, eta, {});
}

HazardSchedule HazardSchedule::inverse_run_length(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("hazard: scale must be positive");
  return HazardSchedule(Kind::InverseRunLength, scale, {});
}

HazardSchedule HazardSchedule::custom(Fn fn) {
  if (!fn) throw std::invalid_argument("hazard: empty schedule function");
  return HazardSchedule(Kind::Custom, 0.0, std::move(fn));
}

double HazardSchedule::operator()(std::int64_t r, std::int64_t s, std::int64_t t) const {
  switch (kind_) {
    case Kind::Constant:
      return value_;
    case Kind::InverseRunLength:
      return value_ / static_cast<double>(t - r + 1);
    case Kind::Custom:
      break;
  }
  return fn_(r, s, t);
}

double HazardSchedule::log_value(std::int64_t r, std::int64_t s, std::int64_t t) const {
  return std::log((*this)(r, s, t));
}

// ---- ForecasterBank ---------------------------------------------------------

ForecasterBank::ForecasterBank(HazardSchedule eta, bool retain_stream, std::int64_t run_start)
    : eta_(std::move(eta)), retain_(retain_stream), r_(run_start), t_(run_start - 1) {}

void ForecasterBank::reset(std::int64_t new_run_start) {
  r_ = new_run_start;
  t_ = new_run_start - 1;
  log_w_.clear();
  sum_.clear();
  log_eta_prev_.clear();
  stream_.clear();
  loss_hat_ = 0.0;
  binary_ = true;
  restart_ = false;
}

void ForecasterBank::ingest(double x) {
  const std::int64_t t = t_ + 1;
  binary_ = binary_ && detail::is_binary(x);
  if (retain_) stream_.push_back(x);
  const bool custom_eta = !eta_.is_constant();

  if (log_w_.empty()) {
    // Run-start forecaster: θ_{r,r,r} = 1 with η_{r,r,r} = 1.
    log_w_.push_back(0.0);
    sum_.push_back(x);
    if (custom_eta) log_eta_prev_.push_back(0.0);
    loss_hat_ = forecaster_loss(0.0, 0.0, x);
    t_ = t;
    restart_ = false;
    return;
  }

  // Spawn weight uses L̂_{r:t−1}, i.e. before this step's loss is added.
  const double log_eta_new = eta_.log_value(r_, t, t);
  const double spawn = log_eta_new - loss_hat_;

  const std::size_t count = log_w_.size();
  double best_other = -std::numeric_limits<double>::infinity();
  double loss_run_start = 0.0;
  const detail::LogTable& lt = detail::LogTable::instance();

  for (std::size_t i = 0; i < count; ++i) {
    // Forecaster s = r + i has history x_{s:t−1} of length t − s.
    const std::int64_t n = t - (r_ + static_cast<std::int64_t>(i));
    double loss;
    if (binary_) {
      const auto k = static_cast<std::int64_t>(sum_[i]);
      loss = x == 1.0 ? lt.log(n + 2) - lt.log(k + 1) : lt.log(n + 2) - lt.log(n - k + 1);
    } else {
      loss = forecaster_loss(sum_[i], static_cast<double>(n), x);
    }
    double lw = log_w_[i] - loss;
    if (custom_eta && i > 0) {
      const double le = eta_.log_value(r_, r_ + static_cast<std::int64_t>(i), t);
      lw += le - log_eta_prev_[i];
      log_eta_prev_[i] = le;
    }
    log_w_[i] = lw;
    sum_[i] += x;
    if (i == 0) loss_run_start = loss;
    else best_other = std::max(best_other, lw);
  }

  log_w_.push_back(spawn);
  sum_.push_back(x);
  if (custom_eta) log_eta_prev_.push_back(log_eta_new);
  loss_hat_ += loss_run_start;
  t_ = t;
  restart_ = std::max(best_other, spawn) > log_w_[0];
}

bool ForecasterBank::restart_test(std::span<const double> log_weights) noexcept {
  if (log_weights.size() < 2) return false;
  const double base = log_weights[0];
  return std::any_of(log_weights.begin() + 1, log_weights.end(), [base](double w) { return w > base; });
}

std::vector<double> ForecasterBank::normalized_weights() const {
  std::vector<double> out(log_w_.size());
  if (log_w_.empty()) return out;
  const double mx = *std::max_element(log_w_.begin(), log_w_.end());
  double total = 0.0;
  for (std::size_t i = 0; i < log_w_.size(); ++i) {
    out[i] = std::exp(log_w_[i] - mx);
    total += out[i];
  }
  for (double& w : out) w /= total;
  return out;
}

bool ForecasterBank::audit() const {
  if (!retain_) return true;
  if (stream_.size() != log_w_.size()) return false;
  double acc = 0.0;
  for (std::size_t i = stream_.size(); i-- > 0;) {
    acc += stream_[i];
    if (std::abs(acc - sum_[i]) > 1e-9 * (1.0 + acc)) return false;
  }
  return true;
}

nlohmann::json ForecasterBank::snapshot() const {
  return {{"run_start", r_},       {"last_index", t_},         {"log_weights", log_w_},
          {"sums", sum_},          {"cumulative_loss", loss_hat_}, {"restart", restart_}};
}

std::optional<std::int64_t> run_offline(std::span<const double> xs, const HazardSchedule& eta) {
  ForecasterBank bank(eta);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    bank.ingest(xs[i]);
    if (bank.restart_check()) return static_cast<std::int64_t>(i) + 1;
  }
  return std::nullopt;
}

}  // namespace rbocoop
