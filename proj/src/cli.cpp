#include "rbocoop/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "rbocoop/bounds.hpp"
#include "rbocoop/config.hpp"
#include "rbocoop/error.hpp"
#include "rbocoop/trace_io.hpp"

namespace rbocoop {

namespace {

struct Source {
  std::string preset;
  std::string config;
};

void add_source(CLI::App& app, Source& src) {
  auto* p = app.add_option("--preset", src.preset, "Bundled preset name (see `presets`)");
  auto* c = app.add_option("--config", src.config, "Experiment config file (JSON)");
  p->excludes(c);
}

ExperimentConfig load_source(const Source& src) {
  if (!src.config.empty()) return load_experiment(src.config);
  if (!src.preset.empty()) return load_preset(src.preset);
  throw ConfigError("", "one of --preset or --config is required");
}

// key=value, value read as JSON when it parses, else as a string.
nlohmann::json parse_assignments(const std::vector<std::string>& items) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--hyper", "expected key=value, got \"" + item + "\"");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    auto parsed = nlohmann::json::parse(value, nullptr, false);
    j[key] = parsed.is_discarded() ? nlohmann::json(value) : parsed;
  }
  return j;
}

std::string fmt_delay(const CpdMetrics& m) {
  auto d = m.mean_delay();
  return d ? fmt::format("{:.1f}", *d) : "-";
}

void print_summary(std::ostream& out, const std::vector<ReplicationResult>& results) {
  out << fmt::format("{:<14} {:>22} {:>10} {:>8} {:>12} {:>10}\n", "policy", "final regret", "correct", "delay",
                     "false alarm", "restarts");
  for (const auto& r : results) {
    out << fmt::format("{:<14} {:>12.1f} ± {:<7.1f} {:>10} {:>8} {:>11.4f}% {:>10}\n", to_string(r.params.kind),
                       r.final_mean, r.final_std, fmt::format("{}/{}", r.restarts.correct, r.restarts.possible),
                       fmt_delay(r.restarts), r.restarts.false_alarm_rate(), r.restarts.events);
  }
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << body;
  if (!f) throw IoError("write failed for " + path.string());
}

int cmd_run(const Source& src, const std::string& policies, std::optional<int> reps, std::optional<std::uint64_t> seed,
            const std::string& out_dir, unsigned jobs, const std::string& format,
            const std::vector<std::string>& hyper, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg = load_source(src);
  if (!policies.empty()) {
    cfg.policies.clear();
    std::stringstream ss(policies);
    for (std::string name; std::getline(ss, name, ',');)
      if (!name.empty()) cfg.policies.push_back(parse_policy_kind(name));
    if (cfg.policies.empty()) throw ConfigError("--policies", "no policy given");
  }
  if (reps) {
    if (*reps < 1) throw ConfigError("--reps", "must be at least 1");
    cfg.replications = *reps;
  }
  if (seed) cfg.seed = *seed;
  if (!hyper.empty()) cfg.hyper = cfg.hyper.merged(hyperparameters_from_json(parse_assignments(hyper)));
  for (const auto& w : validate_experiment(cfg)) err << "warning: " << w << '\n';

  const bool csv = format == "csv" || format == "both";
  const bool js = format == "json" || format == "both";
  const std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  std::vector<ReplicationResult> results;
  for (PolicyKind k : cfg.policies) {
    ReplicationResult r = replicate(cfg.run_config(k), jobs);
    if (csv) {
      const std::string name = to_string(k);
      std::ostringstream t, e, g;
      write_trace_csv(t, r.traces);
      write_events_csv(e, r.traces);
      write_regret_csv(g, r);
      write_file(dir / (name + ".trace.csv"), t.str());
      write_file(dir / (name + ".events.csv"), e.str());
      write_file(dir / (name + ".regret.csv"), g.str());
    }
    r.traces.shrink_to_fit();
    results.push_back(std::move(r));
  }
  if (js) write_file(dir / "summary.json", summary_json(results, cfg.to_json()).dump(2) + "\n");

  out << fmt::format("{}: {} replications, seed {}\n", cfg.name.empty() ? "config" : cfg.name, cfg.replications,
                     cfg.seed);
  print_summary(out, results);
  out << "artifacts: " << dir.string() << '\n';
  return 0;
}

struct BoundsArgs {
  int degree = 3;
  double delta = 0.01;
  std::optional<double> gap;
  std::int64_t n_before = 100;
  double eta = 1e-3;
  double alpha = 2.0;
};

int cmd_bounds(const BoundsArgs& a, const Source& src, std::ostream& out) {
  if (a.degree < 1) throw ConfigError("--degree", "must be at least 1");
  if (!(a.delta >= 0.0 && a.delta <= 1.0)) throw ConfigError("--delta", "must lie in [0, 1]");
  out << fmt::format("{:<34} {}\n", "coop false alarm sigma", fmt::format("{:.6g}", coop_false_alarm(a.degree, a.delta)));

  const bool needs_open = a.gap || !src.preset.empty() || !src.config.empty();
  if (needs_open && !(a.delta > 0.0 && a.delta < 1.0))
    throw ConfigError("--delta", "must lie in (0, 1) for delay and regret bounds");

  if (a.gap) {
    if (!(*a.gap > 0.0 && *a.gap <= 1.0)) throw ConfigError("--gap", "must lie in (0, 1]");
    if (a.n_before < 2) throw ConfigError("--n-before", "must be at least 2");
    if (!(a.eta > 0.0 && a.eta <= 1.0)) throw ConfigError("--eta", "must lie in (0, 1]");
    if (!(a.alpha > 1.0)) throw ConfigError("--alpha", "must exceed 1");
    const auto d = detection_delay(*a.gap, a.n_before, a.delta, HazardSchedule::constant(a.eta));
    out << fmt::format("{:<34} {}\n", "detection delay bound",
                       d.found() ? std::to_string(d.delay) : to_string(d.status));
    out << fmt::format("{:<34} {:.6g}\n", "false-alarm eta threshold (min)",
                       false_alarm_eta_threshold_min(a.n_before, a.delta, a.alpha));
    if (d.found())
      out << fmt::format("{:<34} {:.6g}\n", "delay eta lower bound",
                         delay_eta_lower_bound(*a.gap, a.n_before, d.delay, a.delta));
  }

  if (!src.preset.empty() || !src.config.empty()) {
    const ExperimentConfig cfg = load_source(src);
    const PolicyParams rbo = resolve_params(PolicyKind::RBOCoopUCB, cfg.hyper, cfg.env);
    BoundInputs in;
    in.horizon = cfg.env.horizon();
    in.arms = cfg.env.arms();
    in.gaps = segment_gaps(cfg.env);
    in.p = rbo.p;
    in.delta = a.delta;
    in.xi = rbo.xi;
    std::vector<int> degrees;
    for (int k = 0; k < cfg.network.agents(); ++k) degrees.push_back(cfg.network.degree(k));
    const double group = group_regret_bound(in, degrees);
    out << fmt::format("{:<34} {:.6g}\n", "regret bound (group)", group);
    for (int k = 0; k < cfg.network.agents(); ++k) {
      BoundInputs one = in;
      one.sigma = degrees[static_cast<std::size_t>(k)] >= 1 ? coop_false_alarm(degrees[static_cast<std::size_t>(k)], a.delta)
                                                          : a.delta;
      out << fmt::format("{:<34} {:.6g}\n", fmt::format("regret bound (agent {})", k + 1), regret_upper_bound(one));
    }
    double corollary = 0.0;
    for (int deg : degrees) corollary += corollary_regret_bound(in, deg);
    out << fmt::format("{:<34} {:.6g}\n", "regret bound (delta=1/T, group)", corollary);
  }
  return 0;
}

int cmd_validate(const Source& src, std::ostream& out) {
  const ExperimentConfig cfg = load_source(src);
  const auto warnings = validate_experiment(cfg);
  out << "ok: " << (cfg.name.empty() ? "config" : cfg.name) << '\n';
  for (const auto& w : warnings) out << "warning: " << w << '\n';
  return 0;
}

int cmd_presets(const std::string& show, std::ostream& out) {
  if (!show.empty()) {
    out << preset_text(show);
    return 0;
  }
  for (const auto& p : list_presets()) out << fmt::format("{:<20} {}\n", p.name, p.description);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cooperative bandits with restarted Bayesian change point detection"};
  app.require_subcommand(1);

  Source run_src;
  std::string policies;
  std::optional<int> reps;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "rbocoop-out";
  unsigned jobs = 0;
  std::string format = "both";
  std::vector<std::string> hyper;
  auto* run = app.add_subcommand("run", "Run policies on a preset or config and export traces");
  add_source(*run, run_src);
  run->add_option("--policies", policies, "Comma-separated policy names (overrides the config)");
  run->add_option("--reps", reps, "Number of replications");
  run->add_option("--seed", seed, "Master seed");
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--jobs", jobs, "Concurrent replications (0 = all cores)")->capture_default_str();
  run->add_option("--format", format, "Artifacts to write")->check(CLI::IsMember({"csv", "json", "both"}))->capture_default_str();
  run->add_option("--hyper", hyper, "Hyperparameter override key=value (repeatable)");

  BoundsArgs bargs;
  Source bounds_src;
  auto* bounds = app.add_subcommand("bounds", "Evaluate false-alarm, delay and regret bounds");
  bounds->add_option("--degree", bargs.degree, "Agent degree for sigma")->capture_default_str();
  bounds->add_option("--delta", bargs.delta, "Per-detector confidence")->capture_default_str();
  bounds->add_option("--gap", bargs.gap, "Change gap for the delay bound");
  bounds->add_option("--n-before", bargs.n_before, "Observations before the change")->capture_default_str();
  bounds->add_option("--eta", bargs.eta, "Constant hazard for the delay bound")->capture_default_str();
  bounds->add_option("--alpha", bargs.alpha, "Exponent of the false-alarm eta threshold")->capture_default_str();
  add_source(*bounds, bounds_src);

  Source val_src;
  auto* validate = app.add_subcommand("validate", "Check a preset or config without running it");
  add_source(*validate, val_src);

  std::string show;
  auto* presets = app.add_subcommand("presets", "List bundled presets");
  presets->add_option("--show", show, "Print one preset's JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*run) return cmd_run(run_src, policies, reps, seed, out_dir, jobs, format, hyper, out, err);
    if (*bounds) return cmd_bounds(bargs, bounds_src, out);
    if (*validate) return cmd_validate(val_src, out);
    if (*presets) return cmd_presets(show, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace rbocoop
