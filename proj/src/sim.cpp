#include "rbocoop/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "rbocoop/error.hpp"
#include "rbocoop/rng.hpp"

namespace rbocoop {

std::uint64_t replication_seed(std::uint64_t seed, int r) {
  return derive_seed(seed, 0x726570ULL, static_cast<std::uint64_t>(r));
}

double draw_reward(const EnvironmentSpec& env, std::uint64_t rep_seed, int agent, std::int64_t t, int arm) {
  SplitMix64 gen(derive_seed(rep_seed, static_cast<std::uint64_t>(agent) + 1, static_cast<std::uint64_t>(t),
                             static_cast<std::uint64_t>(arm) + 1));
  return env.sample(t, arm, gen);
}

std::vector<std::string> check_network(const RunConfig& config) {
  if (!is_cooperative(config.policy) || config.network.agents() == 1) return {};
  return config.network.validate(config.assumption);
}

namespace {

struct Layout {
  std::vector<std::vector<int>> neighborhoods;
  std::vector<double> alpha;
  std::vector<int> thresholds;
};

// A cooperative policy on a single agent degenerates to a singleton
// neighbourhood with α = 0.
Layout layout_for(const RunConfig& config, const PolicyParams& params) {
  const int K = config.network.agents();
  Layout l;
  for (int k = 0; k < K; ++k) {
    if (params.cooperative && K > 1) {
      l.neighborhoods.push_back(config.network.neighbors(k));
      l.alpha.push_back(config.network.alpha(k));
      l.thresholds.push_back(vote_threshold(params.vote_rule, config.network.degree(k)));
    } else {
      l.neighborhoods.push_back({k});
      l.alpha.push_back(0.0);
      l.thresholds.push_back(1);
    }
  }
  return l;
}

std::int64_t total_count(const AgentPolicy& a) {
  double n = 0.0;
  for (int m = 0; m < a.arms(); ++m) n += a.count(m);
  return static_cast<std::int64_t>(std::llround(n));
}

}  // namespace

RunTrace run_single(const RunConfig& config, int replication) {
  const EnvironmentSpec& env = config.env;
  const PolicyParams params = resolve_params(config.policy, config.hyper, env);
  check_network(config);
  const Layout layout = layout_for(config, params);

  const int K = config.network.agents();
  const int M = env.arms();
  const std::int64_t T = env.horizon();
  const std::uint64_t rep_seed = replication_seed(config.seed, replication);

  RunTrace tr;
  tr.replication = replication;
  tr.seed = rep_seed;
  tr.policy = config.policy;
  tr.agents = K;
  tr.arms = M;
  tr.horizon = T;
  const auto cells = static_cast<std::size_t>(T) * static_cast<std::size_t>(K);
  tr.actions.resize(cells);
  tr.rewards.resize(cells);
  tr.chosen_means.resize(cells);
  tr.oracle_means.resize(static_cast<std::size_t>(T));
  tr.cum_regret.resize(static_cast<std::size_t>(T));
  tr.agent_regret.assign(static_cast<std::size_t>(K), 0.0);
  tr.counts.assign(static_cast<std::size_t>(K), {});

  std::vector<std::unique_ptr<AgentPolicy>> agents;
  for (int k = 0; k < K; ++k)
    agents.push_back(make_agent(params, layout.alpha[static_cast<std::size_t>(k)], agent_seed(rep_seed, k)));

  const bool detecting = params.detector != DetectorKind::None;
  DetectionLog log(K, M, params.memory_window);
  std::vector<int> arm(static_cast<std::size_t>(K));
  std::vector<double> x(static_cast<std::size_t>(K));
  std::vector<std::int64_t> tau(static_cast<std::size_t>(K));
  double regret = 0.0;

  for (std::int64_t t = 1; t <= T; ++t) {
    const auto ts = static_cast<std::size_t>(t - 1);
    const auto& means = env.segments()[static_cast<std::size_t>(env.segment_index(t))].means;
    const double best = *std::max_element(means.begin(), means.end());
    tr.oracle_means[ts] = best;

    // Select, then play.
    for (int k = 0; k < K; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      arm[uk] = agents[uk]->select(t);
      x[uk] = draw_reward(env, rep_seed, k, t, arm[uk]);
      const double mu = means[static_cast<std::size_t>(arm[uk])];
      const std::size_t cell = ts * static_cast<std::size_t>(K) + uk;
      tr.actions[cell] = arm[uk];
      tr.rewards[cell] = x[uk];
      tr.chosen_means[cell] = mu;
      tr.agent_regret[uk] += best - mu;
      regret += best - mu;
    }
    tr.cum_regret[ts] = regret;

    // Share within neighbourhoods (ascending agent order) and detect.
    for (int k = 0; k < K; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      AgentPolicy& a = *agents[uk];
      for (int j : layout.neighborhoods[uk]) {
        const int m = arm[static_cast<std::size_t>(j)];
        ++tr.counts[uk].received;
        if (a.observe(m, x[static_cast<std::size_t>(j)], t)) {
          const auto obs = static_cast<std::int64_t>(std::llround(a.count(m)));
          log.record(k, m, t, obs);
          tr.detections.push_back({k, m, t, obs});
        }
      }
      a.end_step(t);
    }

    // Vote on a frozen snapshot, then restart.
    if (detecting) {
      for (int k = 0; k < K; ++k) tau[static_cast<std::size_t>(k)] = agents[static_cast<std::size_t>(k)]->last_restart();
      for (int k : apply_votes(log, layout.neighborhoods, layout.thresholds, tau, t)) {
        AgentPolicy& a = *agents[static_cast<std::size_t>(k)];
        tr.counts[static_cast<std::size_t>(k)].discarded += total_count(a);
        a.restart(t);
        tr.restarts.push_back({k, t});
      }
      if (t % 64 == 0) log.prune(t + 1);
    }
  }
  for (int k = 0; k < K; ++k) tr.counts[static_cast<std::size_t>(k)].final_total = total_count(*agents[static_cast<std::size_t>(k)]);
  return tr;
}

std::vector<double> group_regret(const RunTrace& trace) {
  std::vector<double> out(static_cast<std::size_t>(trace.horizon));
  double acc = 0.0;
  const auto K = static_cast<std::size_t>(trace.agents);
  for (std::size_t t = 0; t < out.size(); ++t) {
    for (std::size_t k = 0; k < K; ++k) acc += trace.oracle_means[t] - trace.chosen_means[t * K + k];
    out[t] = acc;
  }
  return out;
}

// ---- change-point metrics -----------------------------------------------------

std::optional<double> CpdMetrics::mean_delay() const {
  if (correct == 0) return std::nullopt;
  return delay_sum / static_cast<double>(correct);
}

double CpdMetrics::false_alarm_rate() const {
  return agent_steps == 0 ? 0.0 : 100.0 * static_cast<double>(false_alarms) / static_cast<double>(agent_steps);
}

CpdMetrics& CpdMetrics::operator+=(const CpdMetrics& o) {
  correct += o.correct;
  possible += o.possible;
  false_alarms += o.false_alarms;
  events += o.events;
  delay_sum += o.delay_sum;
  agent_steps += o.agent_steps;
  return *this;
}

std::int64_t default_matching_window(const EnvironmentSpec& env) {
  const auto& segs = env.segments();
  std::int64_t shortest = env.horizon();
  for (std::size_t n = 0; n < segs.size(); ++n) {
    const std::int64_t end = n + 1 < segs.size() ? segs[n + 1].start : env.horizon() + 1;
    shortest = std::min(shortest, end - segs[n].start);
  }
  return std::max<std::int64_t>(1, shortest / 2);
}

CpdMetrics cpd_metrics(const RunTrace& trace, const EnvironmentSpec& env, std::int64_t matching_window,
                       EventSource source) {
  if (matching_window < 1) throw std::invalid_argument("cpd_metrics: matching window must be positive");
  const auto cps = env.change_points();
  CpdMetrics out;
  out.possible = static_cast<std::int64_t>(trace.agents) * static_cast<std::int64_t>(cps.size() - 1);
  out.agent_steps = static_cast<std::int64_t>(trace.agents) * trace.horizon;

  std::vector<std::vector<std::int64_t>> per_agent(static_cast<std::size_t>(trace.agents));
  if (source == EventSource::Restart)
    for (const auto& e : trace.restarts) per_agent[static_cast<std::size_t>(e.agent)].push_back(e.step);
  else
    for (const auto& e : trace.detections) per_agent[static_cast<std::size_t>(e.agent)].push_back(e.step);

  for (auto& steps : per_agent) {
    std::sort(steps.begin(), steps.end());
    out.events += static_cast<std::int64_t>(steps.size());
    for (std::size_t n = 1; n < cps.size(); ++n) {
      const std::int64_t nu = cps[n];
      const std::int64_t next = n + 1 < cps.size() ? cps[n + 1] : trace.horizon + 1;
      auto it = std::lower_bound(steps.begin(), steps.end(), nu);
      if (it != steps.end() && *it < std::min(nu + matching_window, next)) {
        ++out.correct;
        out.delay_sum += static_cast<double>(*it - nu);
      }
    }
  }
  out.false_alarms = out.events - out.correct;
  return out;
}

// ---- replication ----------------------------------------------------------------

std::pair<double, double> mean_std(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double v : xs) sum += v;
  const double mean = sum / static_cast<double>(xs.size());
  if (xs.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : xs) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

ReplicationResult replicate(const RunConfig& config, unsigned jobs) {
  if (config.replications < 1) throw ConfigError("replications", "must be at least 1");
  ReplicationResult res;
  res.params = resolve_params(config.policy, config.hyper, config.env);
  res.warnings = check_network(config);
  res.matching_window = config.matching_window.value_or(default_matching_window(config.env));
  if (res.matching_window < 1) throw ConfigError("metrics.matching_window", "must be positive");

  const int n = config.replications;
  res.traces.resize(static_cast<std::size_t>(n));
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(n));

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (int r = next++; r < n; r = next++) {
      try {
        res.traces[static_cast<std::size_t>(r)] = run_single(config, r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  const auto T = static_cast<std::size_t>(config.env.horizon());
  res.mean_regret.assign(T, 0.0);
  res.std_regret.assign(T, 0.0);
  std::vector<double> column(static_cast<std::size_t>(n));
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t r = 0; r < column.size(); ++r) column[r] = res.traces[r].cum_regret[t];
    std::tie(res.mean_regret[t], res.std_regret[t]) = mean_std(column);
  }
  for (const auto& tr : res.traces) {
    res.final_regrets.push_back(tr.final_regret());
    res.restarts += cpd_metrics(tr, config.env, res.matching_window, EventSource::Restart);
    res.detections += cpd_metrics(tr, config.env, res.matching_window, EventSource::Detection);
  }
  std::tie(res.final_mean, res.final_std) = mean_std(res.final_regrets);
  return res;
}

}  // namespace rbocoop
