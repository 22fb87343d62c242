#include "rbocoop/config.hpp"

#include <fstream>
#include <sstream>
#include <string_view>
#include <utility>

#include <fmt/format.h>

#include "rbocoop/bounds.hpp"
#include "rbocoop/error.hpp"

namespace rbocoop {

namespace detail {
const std::vector<std::pair<std::string_view, std::string_view>>& preset_table();
}

using nlohmann::json;

RunConfig ExperimentConfig::run_config(PolicyKind policy) const {
  Hyperparameters h = hyper;
  if (auto it = overrides.find(policy); it != overrides.end()) h = h.merged(it->second);
  return RunConfig{env, network, policy, h, seed, replications, assumption, matching_window};
}

json ExperimentConfig::to_json() const {
  json pol = json::array();
  for (PolicyKind k : policies) pol.push_back(to_string(k));
  json j = {{"name", name},
            {"description", description},
            {"seed", seed},
            {"replications", replications},
            {"assumption", to_string(assumption)},
            {"graph", network.to_json()},
            {"environment", spec_to_json(env)},
            {"policies", pol},
            {"hyperparameters", hyperparameters_to_json(hyper)}};
  if (!overrides.empty()) {
    json o = json::object();
    for (const auto& [k, h] : overrides) o[to_string(k)] = hyperparameters_to_json(h);
    j["policy_overrides"] = o;
  }
  if (matching_window) j["metrics"] = {{"matching_window", *matching_window}};
  return j;
}

namespace {

[[noreturn]] void structural(const std::string& field, const std::string& msg) {
  throw ParseError(0, field + ": " + msg);
}

const json& need(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) structural(key, "missing field");
  return *it;
}

}  // namespace

ExperimentConfig experiment_from_json(const json& j) {
  if (!j.is_object()) structural("config", "expected an object");
  static const char* known[] = {"name", "description", "seed", "replications", "assumption", "graph", "environment",
                                "policies", "hyperparameters", "policy_overrides", "metrics"};
  for (const auto& [key, _] : j.items()) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) == std::end(known))
      throw ConfigError(key, "unknown configuration field");
  }

  EnvironmentSpec env = spec_from_json(need(j, "environment"));
  Network net = Network::from_json(need(j, "graph"));
  ExperimentConfig c{.env = std::move(env), .network = std::move(net)};

  if (j.contains("name")) {
    if (!j["name"].is_string()) structural("name", "expected a string");
    c.name = j["name"].get<std::string>();
  }
  if (j.contains("description")) {
    if (!j["description"].is_string()) structural("description", "expected a string");
    c.description = j["description"].get<std::string>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) structural("seed", "expected a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("replications")) {
    if (!j["replications"].is_number_integer()) structural("replications", "expected an integer");
    const auto r = j["replications"].get<std::int64_t>();
    if (r < 1 || r > 100000) throw ConfigError("replications", "must lie in [1, 100000]");
    c.replications = static_cast<int>(r);
  }
  if (j.contains("assumption")) {
    if (!j["assumption"].is_string()) structural("assumption", "expected a string");
    c.assumption = parse_assumption_mode(j["assumption"].get<std::string>());
  }
  const json& pol = need(j, "policies");
  if (!pol.is_array() || pol.empty()) structural("policies", "expected a non-empty array");
  for (const auto& p : pol) {
    if (!p.is_string()) structural("policies", "expected policy names");
    c.policies.push_back(parse_policy_kind(p.get<std::string>()));
  }
  if (j.contains("hyperparameters")) c.hyper = hyperparameters_from_json(j["hyperparameters"]);
  if (j.contains("policy_overrides")) {
    const json& o = j["policy_overrides"];
    if (!o.is_object()) structural("policy_overrides", "expected an object");
    for (const auto& [name, h] : o.items()) c.overrides[parse_policy_kind(name)] = hyperparameters_from_json(h);
  }
  if (j.contains("metrics")) {
    const json& m = j["metrics"];
    if (!m.is_object()) structural("metrics", "expected an object");
    for (const auto& [key, v] : m.items()) {
      if (key != "matching_window") throw ConfigError("metrics." + key, "unknown metrics field");
      if (!v.is_number_integer()) structural("metrics.matching_window", "expected an integer");
      c.matching_window = v.get<std::int64_t>();
      if (*c.matching_window < 1) throw ConfigError("metrics.matching_window", "must be positive");
    }
  }
  return c;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return experiment_from_json(parse_json_text(ss.str()));
}

void save_experiment(const ExperimentConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config file " + path.string());
  out << config.to_json().dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<std::string> validate_experiment(const ExperimentConfig& config) {
  std::vector<std::string> warnings;
  bool network_checked = false;
  for (PolicyKind k : config.policies) {
    const RunConfig rc = config.run_config(k);
    const PolicyParams params = resolve_params(k, rc.hyper, rc.env);
    if (params.cooperative && !network_checked) {
      for (auto& w : check_network(rc)) warnings.push_back("graph: " + w);
      network_checked = true;
    }
    if (params.detector == DetectorKind::Rbo) {
      for (auto& w : delay_assumption_warnings(rc.env, params.p, 0.05, HazardSchedule::constant(params.eta)))
        warnings.push_back(fmt::format("{}: {}", to_string(k), w));
    }
  }
  return warnings;
}

std::vector<PresetInfo> list_presets() {
  std::vector<PresetInfo> out;
  for (const auto& [name, text] : detail::preset_table()) {
    const json j = json::parse(text);
    out.push_back({std::string(name), j.value("description", "")});
  }
  return out;
}

std::string preset_text(const std::string& name) {
  for (const auto& [n, text] : detail::preset_table())
    if (n == name) return std::string(text);
  throw ConfigError("preset", fmt::format("unknown preset \"{}\"", name));
}

ExperimentConfig load_preset(const std::string& name) {
  return experiment_from_json(parse_json_text(preset_text(name)));
}

}  // namespace rbocoop
