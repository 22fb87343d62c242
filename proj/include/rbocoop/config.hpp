#pragma once

// Experiment configuration files and the bundled presets.
//
// {
//   "name": "...", "description": "...",
//   "seed": 1, "replications": 10, "assumption": "strict" | "permissive",
//   "graph": {"agents": K, "edges": [[k, j], ...]},          // 1-based
//   "environment": {horizon, arms, family, segments: [...]},
//   "policies": ["rbo-coop-ucb", ...],
//   "hyperparameters": {...},                                // all policies
//   "policy_overrides": {"ucb": {...}},                      // per policy
//   "metrics": {"matching_window": n}
// }

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rbocoop/sim.hpp"

namespace rbocoop {

struct ExperimentConfig {
  std::string name{};
  std::string description{};
  EnvironmentSpec env;
  Network network;
  std::vector<PolicyKind> policies{};
  Hyperparameters hyper{};
  std::map<PolicyKind, Hyperparameters> overrides{};
  std::uint64_t seed = 1;
  int replications = 1;
  AssumptionMode assumption = AssumptionMode::Strict;
  std::optional<std::int64_t> matching_window{};

  RunConfig run_config(PolicyKind policy) const;
  nlohmann::json to_json() const;
};

ExperimentConfig experiment_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment(const std::filesystem::path& path);
void save_experiment(const ExperimentConfig& config, const std::filesystem::path& path);

/// Resolves every policy's parameters and checks the network; returns
/// warnings, throws ConfigError on the first hard error.
std::vector<std::string> validate_experiment(const ExperimentConfig& config);

struct PresetInfo {
  std::string name;
  std::string description;
};

std::vector<PresetInfo> list_presets();
/// Raw JSON text of a bundled preset; ConfigError when unknown.
std::string preset_text(const std::string& name);
ExperimentConfig load_preset(const std::string& name);

}  // namespace rbocoop
