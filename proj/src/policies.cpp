#include "rbocoop/policies.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "rbocoop/detectors.hpp"
#include "rbocoop/error.hpp"
#include "rbocoop/rbocpd.hpp"
#include "rbocoop/rng.hpp"

namespace rbocoop {

using nlohmann::json;

namespace {

struct KindInfo {
  PolicyKind kind;
  const char* name;
  bool cooperative;
  DetectorKind detector;
  StatsKind stats;
};

constexpr std::array<KindInfo, 12> kKinds{{
    {PolicyKind::RBOCoopUCB, "rbo-coop-ucb", true, DetectorKind::Rbo, StatsKind::Plain},
    {PolicyKind::RBOUCB, "rbo-ucb", false, DetectorKind::Rbo, StatsKind::Plain},
    {PolicyKind::GLRCoopUCB, "glr-coop-ucb", true, DetectorKind::Glr, StatsKind::Plain},
    {PolicyKind::GLRUCB, "glr-ucb", false, DetectorKind::Glr, StatsKind::Plain},
    {PolicyKind::MUCB, "m-ucb", false, DetectorKind::Window, StatsKind::Plain},
    {PolicyKind::MCoopUCB, "m-coop-ucb", true, DetectorKind::Window, StatsKind::Plain},
    {PolicyKind::UCB, "ucb", false, DetectorKind::None, StatsKind::Plain},
    {PolicyKind::DUCB, "d-ucb", false, DetectorKind::None, StatsKind::Discounted},
    {PolicyKind::SWUCB, "sw-ucb", false, DetectorKind::None, StatsKind::Sliding},
    {PolicyKind::DCoopUCB, "d-coop-ucb", true, DetectorKind::None, StatsKind::Discounted},
    {PolicyKind::SWCoopUCB, "sw-coop-ucb", true, DetectorKind::None, StatsKind::Sliding},
    {PolicyKind::EXP3, "exp3", false, DetectorKind::None, StatsKind::Plain},
}};

const KindInfo& info(PolicyKind kind) {
  for (const auto& k : kKinds)
    if (k.kind == kind) return k;
  throw std::invalid_argument("unknown PolicyKind");
}

}  // namespace

std::string to_string(PolicyKind kind) { return info(kind).name; }

PolicyKind parse_policy_kind(const std::string& name) {
  for (const auto& k : kKinds)
    if (name == k.name) return k.kind;
  throw ConfigError("policies", fmt::format("unknown policy \"{}\"", name));
}

const std::vector<PolicyKind>& all_policy_kinds() {
  static const std::vector<PolicyKind> all = [] {
    std::vector<PolicyKind> v;
    for (const auto& k : kKinds) v.push_back(k.kind);
    return v;
  }();
  return all;
}

bool is_cooperative(PolicyKind kind) { return info(kind).cooperative; }
DetectorKind detector_of(PolicyKind kind) { return info(kind).detector; }
StatsKind stats_of(PolicyKind kind) { return info(kind).stats; }

// ---- hyperparameters --------------------------------------------------------

Hyperparameters Hyperparameters::merged(const Hyperparameters& over) const {
  Hyperparameters h = *this;
  auto take = [](auto& dst, const auto& src) {
    if (src) dst = src;
  };
  take(h.xi, over.xi);
  take(h.p, over.p);
  take(h.eta, over.eta);
  take(h.detector, over.detector);
  take(h.glr_delta, over.glr_delta);
  take(h.glr_stride, over.glr_stride);
  take(h.mucb_window, over.mucb_window);
  take(h.mucb_threshold, over.mucb_threshold);
  take(h.mucb_gamma, over.mucb_gamma);
  take(h.discount, over.discount);
  take(h.sliding_window, over.sliding_window);
  take(h.exp3_gamma, over.exp3_gamma);
  take(h.vote_rule, over.vote_rule);
  take(h.memory_window, over.memory_window);
  return h;
}

namespace {

[[noreturn]] void bad_type(const std::string& key, const char* what) {
  throw ParseError(0, fmt::format("hyperparameters.{}: expected {}", key, what));
}

double num(const json& v, const std::string& key) {
  if (!v.is_number()) bad_type(key, "a number");
  return v.get<double>();
}

std::int64_t integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) bad_type(key, "an integer");
  return v.get<std::int64_t>();
}

}  // namespace

Hyperparameters hyperparameters_from_json(const json& j) {
  Hyperparameters h;
  if (j.is_null()) return h;
  if (!j.is_object()) throw ParseError(0, "hyperparameters: expected an object");
  for (const auto& [key, v] : j.items()) {
    if (key == "xi") h.xi = num(v, key);
    else if (key == "p") h.p = num(v, key);
    else if (key == "eta") h.eta = num(v, key);
    else if (key == "detector") {
      if (!v.is_boolean()) bad_type(key, "a boolean");
      h.detector = v.get<bool>();
    } else if (key == "glr_delta") h.glr_delta = num(v, key);
    else if (key == "glr_stride") h.glr_stride = static_cast<int>(integer(v, key));
    else if (key == "mucb_window") h.mucb_window = static_cast<int>(integer(v, key));
    else if (key == "mucb_threshold") h.mucb_threshold = num(v, key);
    else if (key == "mucb_gamma") h.mucb_gamma = num(v, key);
    else if (key == "discount") h.discount = num(v, key);
    else if (key == "sliding_window") h.sliding_window = integer(v, key);
    else if (key == "exp3_gamma") h.exp3_gamma = num(v, key);
    else if (key == "vote_rule") {
      if (!v.is_string()) bad_type(key, "a string");
      h.vote_rule = parse_vote_rule(v.get<std::string>());
    } else if (key == "memory_window") h.memory_window = integer(v, key);
    else throw ConfigError("hyperparameters." + key, "unknown hyperparameter");
  }
  return h;
}

json hyperparameters_to_json(const Hyperparameters& h) {
  json j = json::object();
  auto put = [&j](const char* key, const auto& v) {
    if (v) j[key] = *v;
  };
  put("xi", h.xi);
  put("p", h.p);
  put("eta", h.eta);
  put("detector", h.detector);
  put("glr_delta", h.glr_delta);
  put("glr_stride", h.glr_stride);
  put("mucb_window", h.mucb_window);
  put("mucb_threshold", h.mucb_threshold);
  put("mucb_gamma", h.mucb_gamma);
  put("discount", h.discount);
  put("sliding_window", h.sliding_window);
  put("exp3_gamma", h.exp3_gamma);
  if (h.vote_rule) j["vote_rule"] = to_string(*h.vote_rule);
  put("memory_window", h.memory_window);
  return j;
}

json PolicyParams::to_json() const {
  json j = {{"policy", rbocoop::to_string(kind)}, {"xi", xi}, {"p", p}, {"cooperative", cooperative}};
  switch (detector) {
    case DetectorKind::Rbo:
      j["detector"] = "rbocpd";
      j["eta"] = eta;
      break;
    case DetectorKind::Glr:
      j["detector"] = "glr";
      j["glr_delta"] = glr_delta;
      j["glr_stride"] = glr_stride;
      break;
    case DetectorKind::Window:
      j["detector"] = "window";
      j["mucb_window"] = mucb_window;
      j["mucb_threshold"] = mucb_threshold;
      break;
    case DetectorKind::None:
      j["detector"] = "none";
      break;
  }
  if (kind == PolicyKind::DUCB || kind == PolicyKind::DCoopUCB) j["discount"] = discount;
  if (kind == PolicyKind::SWUCB || kind == PolicyKind::SWCoopUCB) j["sliding_window"] = sliding_window;
  if (kind == PolicyKind::EXP3) j["exp3_gamma"] = exp3_gamma;
  if (cooperative) {
    j["vote_rule"] = rbocoop::to_string(vote_rule);
    j["memory_window"] = memory_window;
  }
  return j;
}

// ---- parameter resolution ---------------------------------------------------

void validate_params(const PolicyParams& q) {
  if (q.arms < 1) throw ConfigError("arms", "must be positive");
  if (!(q.xi > 0.0) || !std::isfinite(q.xi)) throw ConfigError("hyperparameters.xi", "must be positive");
  if (!(q.p >= 0.0) || !std::isfinite(q.p)) throw ConfigError("hyperparameters.p", "must be nonnegative");
  if (q.p > 0.0 && std::floor(q.arms / q.p) < q.arms)
    throw ConfigError("hyperparameters.p",
                      fmt::format("forced exploration requires floor(M/p) >= M, got floor({}/{}) = {}", q.arms,
                                  q.p, std::floor(q.arms / q.p)));
  switch (q.detector) {
    case DetectorKind::Rbo:
      if (!(q.eta > 0.0 && q.eta <= 1.0)) throw ConfigError("hyperparameters.eta", "must lie in (0, 1]");
      break;
    case DetectorKind::Glr:
      if (!(q.glr_delta > 0.0 && q.glr_delta < 1.0))
        throw ConfigError("hyperparameters.glr_delta", "must lie in (0, 1)");
      if (q.glr_stride < 1) throw ConfigError("hyperparameters.glr_stride", "must be at least 1");
      break;
    case DetectorKind::Window:
      if (q.mucb_window < 2 || q.mucb_window % 2 != 0)
        throw ConfigError("hyperparameters.mucb_window", "must be an even integer >= 2");
      if (!(q.mucb_threshold > 0.0)) throw ConfigError("hyperparameters.mucb_threshold", "must be positive");
      break;
    case DetectorKind::None:
      break;
  }
  if (!(q.discount > 0.0 && q.discount <= 1.0)) throw ConfigError("hyperparameters.discount", "must lie in (0, 1]");
  if (stats_of(q.kind) == StatsKind::Sliding && q.sliding_window < 1)
    throw ConfigError("hyperparameters.sliding_window", "must be at least 1");
  if (q.kind == PolicyKind::EXP3 && !(q.exp3_gamma > 0.0 && q.exp3_gamma <= 1.0))
    throw ConfigError("hyperparameters.exp3_gamma", "must lie in (0, 1]");
  if (q.memory_window < 1) throw ConfigError("hyperparameters.memory_window", "must be at least 1");
}

PolicyParams resolve_params(PolicyKind kind, const Hyperparameters& h, const EnvironmentSpec& env) {
  PolicyParams q;
  q.kind = kind;
  q.arms = env.arms();
  q.horizon = env.horizon();
  q.segments = env.num_segments();
  q.cooperative = is_cooperative(kind);
  q.detector = detector_of(kind);
  if (h.detector && !*h.detector) q.detector = DetectorKind::None;

  const double T = static_cast<double>(env.horizon());
  const double M = env.arms();
  const double N = env.num_segments();
  const double logT = std::log(T);
  const double active_p = std::sqrt(logT / T);

  q.xi = h.xi.value_or(1.0);
  q.eta = h.eta.value_or(10.0 / T);
  q.glr_delta = h.glr_delta.value_or(std::min(10.0 / T, 0.5));
  q.glr_stride = h.glr_stride.value_or(1);
  q.mucb_window = h.mucb_window.value_or(800);
  q.mucb_threshold = h.mucb_threshold.value_or(mucb_threshold(q.mucb_window, env.arms(), env.horizon()));
  q.discount = h.discount.value_or(1.0 - std::sqrt(N / T) / 4.0);
  q.sliding_window = h.sliding_window.value_or(
      std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(2.0 * std::sqrt(T * logT / N)))));
  q.exp3_gamma = h.exp3_gamma.value_or(
      M > 1 ? std::min(1.0, std::sqrt(M * std::log(M) / ((std::exp(1.0) - 1.0) * T))) : 1.0);
  q.vote_rule = h.vote_rule.value_or(VoteRule::CeilHalfDegree);

  switch (kind) {
    case PolicyKind::RBOCoopUCB:
    case PolicyKind::RBOUCB:
    case PolicyKind::GLRCoopUCB:
    case PolicyKind::GLRUCB:
      q.p = h.p.value_or(active_p);
      break;
    case PolicyKind::MUCB:
    case PolicyKind::MCoopUCB:
      q.p = h.mucb_gamma.value_or(
          0.05 * std::sqrt((N - 1.0) * (2.0 * q.mucb_threshold + 3.0 * std::sqrt(q.mucb_window)) / (2.0 * T)));
      break;
    default:
      q.p = h.p.value_or(0.0);
      break;
  }
  const std::int64_t cycle = q.p > 0.0 ? static_cast<std::int64_t>(std::floor(M / q.p)) : env.arms();
  q.memory_window = h.memory_window.value_or(2 * std::max<std::int64_t>(cycle, 1));
  validate_params(q);
  return q;
}

std::optional<int> forced_exploration_arm(std::int64_t t, std::int64_t tau, int arms, double p) {
  if (!(p > 0.0)) return std::nullopt;
  const auto period = static_cast<std::int64_t>(std::floor(arms / p));
  if (period < 1) return std::nullopt;
  const std::int64_t q = (t - tau) % period;
  if (q >= 1 && q <= arms) return static_cast<int>(q - 1);
  return std::nullopt;
}

double ucb_index(double n, double s, double clock, double xi, double alpha) {
  if (n <= 0.0) return std::numeric_limits<double>::infinity();
  const double lg = clock > 1.0 ? std::log(clock) : 0.0;
  return s / n + std::sqrt(std::max(0.0, xi * (alpha + 1.0) * lg) / n);
}

std::uint64_t agent_seed(std::uint64_t replication_seed, int agent) {
  return derive_seed(replication_seed, 0x61676e74ULL, static_cast<std::uint64_t>(agent));
}

// ---- agents -----------------------------------------------------------------

namespace {

class ArmDetector {
 public:
  virtual ~ArmDetector() = default;
  /// Returns true when the detector fires; it then resets itself.
  virtual bool ingest(double x) = 0;
  virtual void reset() = 0;
};

class RboArm final : public ArmDetector {
 public:
  explicit RboArm(double eta) : bank_(HazardSchedule::constant(eta)) {}
  bool ingest(double x) override {
    bank_.ingest(x);
    if (!bank_.restart_check()) return false;
    bank_.reset();
    return true;
  }
  void reset() override { bank_.reset(1); }

 private:
  ForecasterBank bank_;
};

class GlrArm final : public ArmDetector {
 public:
  GlrArm(double delta, int stride) : det_(delta, stride) {}
  bool ingest(double x) override {
    det_.ingest(x);
    if (!det_.detect()) return false;
    det_.reset();
    return true;
  }
  void reset() override { det_.reset(); }

 private:
  GlrDetector det_;
};

class WindowArm final : public ArmDetector {
 public:
  WindowArm(int window, double threshold) : det_(window, threshold) {}
  bool ingest(double x) override {
    det_.ingest(x);
    if (!det_.detect()) return false;
    det_.reset();
    return true;
  }
  void reset() override { det_.reset(); }

 private:
  WindowDetector det_;
};

std::unique_ptr<ArmDetector> make_detector(const PolicyParams& q) {
  switch (q.detector) {
    case DetectorKind::Rbo: return std::make_unique<RboArm>(q.eta);
    case DetectorKind::Glr: return std::make_unique<GlrArm>(q.glr_delta, q.glr_stride);
    case DetectorKind::Window: return std::make_unique<WindowArm>(q.mucb_window, q.mucb_threshold);
    case DetectorKind::None: break;
  }
  return nullptr;
}

class UcbAgent final : public AgentPolicy {
 public:
  UcbAgent(const PolicyParams& q, double alpha, std::uint64_t seed)
      : AgentPolicy(q.arms), q_(q), stats_(stats_of(q.kind)), alpha_(alpha), rng_(seed),
        n_(static_cast<std::size_t>(q.arms), 0.0), s_(static_cast<std::size_t>(q.arms), 0.0) {
    if (q.detector != DetectorKind::None)
      for (int m = 0; m < q.arms; ++m) detectors_.push_back(make_detector(q));
  }

  int select(std::int64_t t) override {
    advance(t);
    if (auto f = forced_exploration_arm(t, tau_, arms_, q_.p)) return *f;
    return argmax_random_tie(indices_at(t), rng_);
  }

  bool observe(int arm, double x, std::int64_t t) override {
    const auto m = static_cast<std::size_t>(arm);
    n_[m] += 1.0;
    s_[m] += x;
    if (stats_ == StatsKind::Sliding) window_.push_back({t, arm, x});
    return !detectors_.empty() && detectors_[m]->ingest(x);
  }

  void restart(std::int64_t t) override {
    tau_ = t;
    std::fill(n_.begin(), n_.end(), 0.0);
    std::fill(s_.begin(), s_.end(), 0.0);
    window_.clear();
    clock_ = 0.0;
    for (auto& d : detectors_) d->reset();
  }

  std::int64_t last_restart() const override { return tau_; }
  double count(int arm) const override { return n_.at(static_cast<std::size_t>(arm)); }
  double reward_sum(int arm) const override { return s_.at(static_cast<std::size_t>(arm)); }
  std::vector<double> indices(std::int64_t t) const override { return indices_at(t); }

 private:
  struct Obs {
    std::int64_t step;
    int arm;
    double x;
  };

  // Brings the discounted or windowed statistics up to step t.
  void advance(std::int64_t t) {
    if (t <= advanced_) return;
    if (stats_ == StatsKind::Discounted) {
      for (std::int64_t u = advanced_; u < t; ++u) {
        if (u > 0)
          for (std::size_t m = 0; m < n_.size(); ++m) {
            n_[m] *= q_.discount;
            s_[m] *= q_.discount;
          }
        clock_ = 1.0 + q_.discount * clock_;
      }
    } else if (stats_ == StatsKind::Sliding) {
      while (!window_.empty() && window_.front().step <= t - q_.sliding_window) {
        const auto m = static_cast<std::size_t>(window_.front().arm);
        n_[m] -= 1.0;
        s_[m] -= window_.front().x;
        if (n_[m] <= 0.0) n_[m] = s_[m] = 0.0;
        window_.pop_front();
      }
    }
    advanced_ = t;
  }

  double clock(std::int64_t t) const {
    switch (stats_) {
      case StatsKind::Discounted: return clock_;
      case StatsKind::Sliding: return static_cast<double>(std::min(t - tau_, q_.sliding_window));
      case StatsKind::Plain: break;
    }
    return static_cast<double>(t - tau_);
  }

  std::vector<double> indices_at(std::int64_t t) const {
    std::vector<double> out(n_.size());
    const double c = clock(t);
    for (std::size_t m = 0; m < n_.size(); ++m) out[m] = ucb_index(n_[m], s_[m], c, q_.xi, alpha_);
    return out;
  }

  PolicyParams q_;
  StatsKind stats_;
  double alpha_;
  std::mt19937_64 rng_;
  std::vector<double> n_;
  std::vector<double> s_;
  std::deque<Obs> window_;
  std::vector<std::unique_ptr<ArmDetector>> detectors_;
  std::int64_t tau_ = 0;
  std::int64_t advanced_ = 0;
  double clock_ = 0.0;
};

class Exp3Agent final : public AgentPolicy {
 public:
  Exp3Agent(const PolicyParams& q, std::uint64_t seed)
      : AgentPolicy(q.arms), gamma_(q.exp3_gamma), rng_(seed), log_w_(static_cast<std::size_t>(q.arms), 0.0),
        n_(static_cast<std::size_t>(q.arms), 0.0), s_(static_cast<std::size_t>(q.arms), 0.0) {
    refresh();
  }

  int select(std::int64_t /*t*/) override {
    const double u = uniform01(rng_);
    double acc = 0.0;
    for (int m = 0; m < arms_; ++m) {
      acc += probs_[static_cast<std::size_t>(m)];
      if (u < acc) return m;
    }
    return arms_ - 1;
  }

  bool observe(int arm, double x, std::int64_t /*t*/) override {
    const auto m = static_cast<std::size_t>(arm);
    n_[m] += 1.0;
    s_[m] += x;
    log_w_[m] += gamma_ * (x / probs_[m]) / arms_;
    refresh();
    return false;
  }

  void restart(std::int64_t t) override {
    tau_ = t;
    std::fill(log_w_.begin(), log_w_.end(), 0.0);
    std::fill(n_.begin(), n_.end(), 0.0);
    std::fill(s_.begin(), s_.end(), 0.0);
    refresh();
  }

  std::int64_t last_restart() const override { return tau_; }
  double count(int arm) const override { return n_.at(static_cast<std::size_t>(arm)); }
  double reward_sum(int arm) const override { return s_.at(static_cast<std::size_t>(arm)); }
  std::vector<double> probabilities() const override { return probs_; }

 private:
  void refresh() {
    const double mx = *std::max_element(log_w_.begin(), log_w_.end());
    probs_.assign(log_w_.size(), 0.0);
    double total = 0.0;
    for (std::size_t m = 0; m < log_w_.size(); ++m) total += probs_[m] = std::exp(log_w_[m] - mx);
    for (double& pm : probs_) pm = (1.0 - gamma_) * pm / total + gamma_ / arms_;
  }

  double gamma_;
  std::mt19937_64 rng_;
  std::vector<double> log_w_;
  std::vector<double> probs_;
  std::vector<double> n_;
  std::vector<double> s_;
  std::int64_t tau_ = 0;
};

}  // namespace

std::unique_ptr<AgentPolicy> make_agent(const PolicyParams& params, double alpha, std::uint64_t seed) {
  if (params.kind == PolicyKind::EXP3) return std::make_unique<Exp3Agent>(params, seed);
  return std::make_unique<UcbAgent>(params, alpha, seed);
}

}  // namespace rbocoop
