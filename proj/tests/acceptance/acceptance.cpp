// Acceptance suite: one PASS/FAIL line per criterion. With arguments, runs
// only the named criteria. Exit status is non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "../support/oracles.hpp"
#include "rbocoop/bounds.hpp"
#include "rbocoop/config.hpp"
#include "rbocoop/rbocpd.hpp"
#include "rbocoop/sim.hpp"
#include "rbocoop/trace_io.hpp"

using namespace rbocoop;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(20240601);
  std::uniform_real_distribution<double> log_eta(std::log(1e-6), std::log(1e-1));
  double worst = 0.0;
  int decision_mismatch = 0;
  for (int seq = 0; seq < 100; ++seq) {
    const double eta = std::exp(log_eta(gen));
    const auto len = 1 + static_cast<std::size_t>(gen() % 64);
    const double bias = uniform01(gen);
    std::vector<double> xs(len);
    for (auto& x : xs) x = uniform01(gen) < bias ? 1.0 : 0.0;
    ForecasterBank bank(HazardSchedule::constant(eta));
    const oracle::Hazard h = [eta](auto, auto, auto) { return eta; };
    for (std::size_t t = 1; t <= len; ++t) {
      bank.ingest(xs[t - 1]);
      const auto ref = oracle::batch_log_weights(xs, t, h);
      if (ref.size() != bank.size()) return {false, fmt::format("sequence {}: {} forecasters, oracle has {}", seq, bank.size(), ref.size())};
      for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(ref[i] - bank.log_weights()[i]));
      decision_mismatch += bank.restart_check() != oracle::batch_restart(ref);
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-9 && decision_mismatch == 0 && secs < 10.0,
          fmt::format("max |Δlog θ| = {:.2e} (≤ 1e-9), decision mismatches {}, {:.2f} s (< 10 s)", worst,
                      decision_mismatch, secs)};
}

Outcome false_alarm_property() {
  const auto t0 = Clock::now();
  int fired = 0;
  for (int i = 0; i < 500; ++i) {
    SplitMix64 gen(derive_seed(0xfa15e, static_cast<std::uint64_t>(i)));
    ForecasterBank bank(HazardSchedule::constant(1e-3));
    bool hit = false;
    for (int t = 0; t < 200 && !hit; ++t) {
      bank.ingest(uniform01(gen) < 0.5 ? 1.0 : 0.0);
      hit = bank.restart_check();
    }
    fired += hit;
  }
  const double secs = seconds_since(t0);
  const double frac = fired / 500.0;
  return {frac <= 0.05 && secs < 30.0,
          fmt::format("restart in {}/500 streams = {:.1f}% (≤ 5%), {:.2f} s (< 30 s)", fired, 100.0 * frac, secs)};
}

Outcome detection_property() {
  const auto t0 = Clock::now();
  const auto bound = detection_delay(0.6, 100, 0.05, HazardSchedule::constant(1e-3));
  if (!bound.found()) return {false, "delay evaluator found no bound at n = 100, Δ = 0.6"};
  int within = 0;
  int detected = 0;
  double delay_sum = 0.0;
  for (int i = 0; i < 500; ++i) {
    SplitMix64 gen(derive_seed(0xde7ec7, static_cast<std::uint64_t>(i)));
    ForecasterBank bank(HazardSchedule::constant(1e-3));
    for (int t = 0; t < 100; ++t) {
      bank.ingest(uniform01(gen) < 0.2 ? 1.0 : 0.0);
      if (bank.restart_check()) bank.reset();  // a pre-change alarm restarts the detector
    }
    for (int j = 1; j <= 2000; ++j) {
      bank.ingest(uniform01(gen) < 0.8 ? 1.0 : 0.0);
      if (bank.restart_check()) {
        ++detected;
        within += j <= 50;
        delay_sum += j;
        break;
      }
    }
  }
  const double secs = seconds_since(t0);
  const double mean = detected ? delay_sum / detected : HUGE_VAL;
  const double frac = within / 500.0;
  return {frac >= 0.95 && mean <= static_cast<double>(bound.delay) && secs < 60.0,
          fmt::format("detected within 50 in {}/500 = {:.1f}% (≥ 95%), mean delay {:.2f} ≤ bound {}, {:.2f} s (< 60 s)",
                      within, 100.0 * frac, mean, bound.delay, secs)};
}

Outcome coop_false_alarm_bound() {
  int violations = 0;
  double worst_ratio = 0.0;
  for (int eta = 3; eta <= 9; eta += 2)
    for (double d : {1e-3, 1e-2, 1e-1}) {
      const double s = coop_false_alarm(eta, d);
      violations += !(s < d);
      worst_ratio = std::max(worst_ratio, s / d);
    }
  const double spot = coop_false_alarm(3, 0.01);
  const double exact = 3.0 * 0.01 * 0.01 * 0.99 + 0.01 * 0.01 * 0.01;
  const bool spot_ok = std::abs(spot - exact) <= 1e-15 && std::abs(spot - 2.98e-4) <= 1e-15;
  return {violations == 0 && spot_ok,
          fmt::format("σ < δ on 12 grid points ({} violations, max σ/δ = {:.3f}); σ(3, 0.01) = {:.6e}", violations,
                      worst_ratio, spot)};
}

// Experiment-I runs shared by the ordering/filtering and envelope checks.
struct ExperimentRuns {
  ExperimentConfig cfg;
  std::map<PolicyKind, ReplicationResult> results;
  double seconds = 0.0;
};

const ExperimentRuns& experiment_runs() {
  static const ExperimentRuns runs = [] {
    ExperimentRuns r{load_preset("experiment1"), {}, 0.0};
    const auto t0 = Clock::now();
    for (PolicyKind k : {PolicyKind::RBOCoopUCB, PolicyKind::RBOUCB, PolicyKind::UCB, PolicyKind::EXP3})
      r.results.emplace(k, replicate(r.cfg.run_config(k), 0));
    r.seconds = seconds_since(t0);
    return r;
  }();
  return runs;
}

Outcome experiment_ordering() {
  const auto& runs = experiment_runs();
  const auto& coop = runs.results.at(PolicyKind::RBOCoopUCB);
  const auto& solo = runs.results.at(PolicyKind::RBOUCB);
  bool ordered = true;
  std::string means;
  for (const auto& [k, res] : runs.results) {
    means += fmt::format("{} {:.1f}; ", to_string(k), res.final_mean);
    if (k != PolicyKind::RBOCoopUCB) ordered = ordered && coop.final_mean < res.final_mean;
  }
  // Filtering: false restarts of the cooperative run relative to the false
  // alarms (= restarts) of the non-cooperative run on the same seeds.
  const double solo_false = static_cast<double>(solo.restarts.false_alarms);
  const double coop_false = static_cast<double>(coop.restarts.false_alarms);
  const double filtered = solo_false > 0.0 ? 1.0 - coop_false / solo_false : 0.0;
  const bool filters = solo_false > 0.0 && filtered >= 0.5;
  // Within the cooperative run: raw false detections that never became restarts.
  const double raw = static_cast<double>(coop.detections.false_alarms);
  const double vote_share = raw > 0.0 ? 1.0 - coop_false / raw : 0.0;
  const bool fast = runs.seconds < 300.0;
  return {ordered && filters && fast,
          fmt::format("ordering {} ({}); filtering {}: {} false restarts vs {} for rbo-ucb = {:.0f}% removed (≥ 50%), "
                      "the vote discarded {:.0f}% of the cooperative run's {} raw false alarms; {:.1f} s (< 300 s)",
                      ordered ? "holds" : "violated", means.substr(0, means.size() - 2), filters ? "holds" : "violated",
                      coop.restarts.false_alarms, solo.restarts.false_alarms, 100.0 * filtered, 100.0 * vote_share,
                      coop.detections.false_alarms, runs.seconds)};
}

Outcome regret_envelope() {
  const auto& runs = experiment_runs();
  const auto& coop = runs.results.at(PolicyKind::RBOCoopUCB);
  const auto& cfg = runs.cfg;
  std::vector<int> degrees;
  for (int k = 0; k < cfg.network.agents(); ++k) degrees.push_back(cfg.network.degree(k));

  BoundInputs in;
  in.horizon = cfg.env.horizon();
  in.arms = cfg.env.arms();
  in.gaps = segment_gaps(cfg.env);
  in.p = coop.params.p;
  in.xi = coop.params.xi;
  int violations = 0;
  double worst = 0.0;
  for (double delta : {0.05, 1.0 / static_cast<double>(cfg.env.horizon())}) {
    in.delta = delta;
    const double group = group_regret_bound(in, degrees);
    for (const auto& tr : coop.traces) {
      violations += !(group >= tr.final_regret());
      worst = std::max(worst, tr.final_regret() / group);
      for (int k = 0; k < cfg.network.agents(); ++k) {
        auto one = in;
        one.sigma = coop_false_alarm(degrees[static_cast<std::size_t>(k)], delta);
        violations += !(regret_upper_bound(one) >= tr.agent_regret[static_cast<std::size_t>(k)]);
      }
    }
  }
  in.delta = 0.05;
  return {violations == 0,
          fmt::format("group and per-agent bounds at δ ∈ {{0.05, 1/T}} hold on all {} replications ({} violations); "
                      "group bound {:.0f} at δ = 0.05, largest regret/bound {:.4f}",
                      coop.traces.size(), violations, group_regret_bound(in, degrees), worst)};
}

Outcome reduction_identities() {
  // (a) one agent, no detector, no forced exploration.
  const auto sanity = load_preset("stationary-sanity");
  int mismatches_a = 0;
  int runs_a = 0;
  for (PolicyKind k : {PolicyKind::RBOCoopUCB, PolicyKind::RBOUCB}) {
    RunConfig c{sanity.env, Network(1, {})};
    c.policy = k;
    c.seed = sanity.seed;
    c.hyper.detector = false;
    c.hyper.p = 0.0;
    for (int r = 0; r < 5; ++r, ++runs_a)
      mismatches_a += run_single(c, r).actions != oracle::reference_ucb(c.env, replication_seed(c.seed, r));
  }

  // (b) D-UCB with γ = 1 and SW-UCB with window T against UCB.
  const auto e1 = load_preset("experiment1");
  int mismatches_b = 0;
  int runs_b = 0;
  for (int r = 0; r < 3; ++r) {
    auto u = e1.run_config(PolicyKind::UCB);
    const auto ref = run_single(u, r).actions;
    auto d = e1.run_config(PolicyKind::DUCB);
    d.hyper.discount = 1.0;
    auto s = e1.run_config(PolicyKind::SWUCB);
    s.hyper.sliding_window = e1.env.horizon();
    mismatches_b += run_single(d, r).actions != ref;
    mismatches_b += run_single(s, r).actions != ref;
    runs_b += 2;
  }
  return {mismatches_a == 0 && mismatches_b == 0,
          fmt::format("(a) {}/{} runs identical to reference UCB; (b) {}/{} D-UCB/SW-UCB runs identical to UCB",
                      runs_a - mismatches_a, runs_a, runs_b - mismatches_b, runs_b)};
}

std::string artifacts(const ReplicationResult& res) {
  std::ostringstream out;
  write_trace_csv(out, res.traces);
  write_events_csv(out, res.traces);
  write_regret_csv(out, res);
  return out.str();
}

Outcome determinism() {
  const auto cfg = load_preset("experiment1");
  std::string detail;
  bool ok = true;
  for (PolicyKind k : {PolicyKind::RBOCoopUCB, PolicyKind::EXP3}) {
    auto c = cfg.run_config(k);
    c.replications = 3;
    const auto a = fnv1a64(artifacts(replicate(c, 1)));
    const auto b = fnv1a64(artifacts(replicate(c, 1)));
    const auto par = fnv1a64(artifacts(replicate(c, 3)));
    ok = ok && a == b && a == par;
    detail += fmt::format("{} {:016x}/{:016x}/{:016x}; ", to_string(k), a, b, par);
  }
  return {ok, "csv hashes (serial, repeat, threaded): " + detail.substr(0, detail.size() - 2)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"detector-oracle", oracle_equivalence},
      {"false-alarm", false_alarm_property},
      {"detection", detection_property},
      {"coop-false-alarm-bound", coop_false_alarm_bound},
      {"experiment1", experiment_ordering},
      {"reductions", reduction_identities},
      {"regret-envelope", regret_envelope},
      {"determinism", determinism},
  };
  std::vector<std::string> only(argv + 1, argv + argc);
  for (const auto& name : only) {
    bool known = false;
    for (const auto& c : criteria) known = known || c.first == name;
    if (!known) {
      std::fprintf(stderr, "unknown criterion %s\n", name.c_str());
      return 2;
    }
  }
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
