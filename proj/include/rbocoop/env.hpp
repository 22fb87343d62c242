#pragma once

// Piecewise-stationary reward processes.
//
// Conventions used throughout the library: wall-clock steps t are 1-based
// (1..T); arm and agent indices are 0-based in the C++ API and 1-based in
// every file format and in CLI output.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rbocoop/rng.hpp"

namespace rbocoop {

enum class RewardFamily { Bernoulli, BoundedGeneric };

/// How a BoundedGeneric arm draws rewards with a prescribed mean μ.
///   Mixture: with probability `param` draw Bernoulli(μ), otherwise return μ.
///   Beta:    Beta(μ·c, (1−μ)·c) with concentration c = `param`.
struct SamplerDescriptor {
  enum class Kind { Mixture, Beta };
  Kind kind = Kind::Mixture;
  double param = 0.5;

  friend bool operator==(const SamplerDescriptor&, const SamplerDescriptor&) = default;
};

struct Segment {
  std::int64_t start = 1;           ///< first step of the segment (ν_n)
  std::vector<double> means;        ///< μ_n^m, one per arm
  std::vector<SamplerDescriptor> samplers;  ///< BoundedGeneric only; empty = default mixture

  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Immutable after construction; the constructor enforces every invariant
/// (starts strictly increasing from 1, means in [0,1], consecutive segments
/// differ in at least one arm) and throws ConfigError otherwise.
class EnvironmentSpec {
 public:
  EnvironmentSpec(std::int64_t horizon, int arms, std::vector<Segment> segments,
                  RewardFamily family = RewardFamily::Bernoulli);

  std::int64_t horizon() const noexcept { return horizon_; }
  int arms() const noexcept { return arms_; }
  RewardFamily family() const noexcept { return family_; }
  const std::vector<Segment>& segments() const noexcept { return segments_; }

  /// N: number of piecewise-stationary segments.
  int num_segments() const noexcept { return static_cast<int>(segments_.size()); }

  /// Segment start steps ν_1 = 1 < ν_2 < ... .
  std::vector<std::int64_t> change_points() const;

  /// 0-based index of the segment containing step t (half-open [ν_n, ν_{n+1})).
  int segment_index(std::int64_t t) const;

  double mean_at(std::int64_t t, int arm) const;

  /// argmax over arms of mean_at, lowest index on ties.
  int optimal_arm(std::int64_t t) const;
  double optimal_mean(std::int64_t t) const { return mean_at(t, optimal_arm(t)); }

  /// One reward draw for `arm` at step t.
  template <class Gen>
  double sample(std::int64_t t, int arm, Gen& gen) const;

  friend bool operator==(const EnvironmentSpec&, const EnvironmentSpec&) = default;

 private:
  void check_step(std::int64_t t) const;
  void check_arm(int arm) const;
  const SamplerDescriptor& sampler(int segment, int arm) const;

  std::int64_t horizon_;
  int arms_;
  std::vector<Segment> segments_;
  RewardFamily family_;
};

/// An M-vector of independent draws, one per arm.
template <class Gen>
std::vector<double> sample_rewards(const EnvironmentSpec& spec, std::int64_t t, Gen& gen) {
  std::vector<double> out(static_cast<std::size_t>(spec.arms()));
  for (int m = 0; m < spec.arms(); ++m) out[static_cast<std::size_t>(m)] = spec.sample(t, m, gen);
  return out;
}

// ---- serialization --------------------------------------------------------

EnvironmentSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const EnvironmentSpec& spec);

/// Throws ParseError (with line number) on malformed text, ConfigError on
/// invariant violations, IoError when the file cannot be read.
EnvironmentSpec load_spec(const std::filesystem::path& path);
void save_spec(const EnvironmentSpec& spec, const std::filesystem::path& path);

/// Parses JSON text, mapping nlohmann parse errors to ParseError with a line.
nlohmann::json parse_json_text(const std::string& text);

/// CSV with columns t,mean_1..mean_M, one row per step.
void write_mean_trajectories_csv(const EnvironmentSpec& spec, std::ostream& out);

std::string to_string(RewardFamily family);

// ---- template implementation ---------------------------------------------

template <class Gen>
double EnvironmentSpec::sample(std::int64_t t, int arm, Gen& gen) const {
  const double mu = mean_at(t, arm);
  if (family_ == RewardFamily::Bernoulli) return uniform01(gen) < mu ? 1.0 : 0.0;

  const SamplerDescriptor& d = sampler(segment_index(t), arm);
  if (d.kind == SamplerDescriptor::Kind::Mixture) {
    if (uniform01(gen) >= d.param) return mu;
    return uniform01(gen) < mu ? 1.0 : 0.0;
  }
  if (mu <= 0.0) return 0.0;
  if (mu >= 1.0) return 1.0;
  std::gamma_distribution<double> ga(mu * d.param, 1.0);
  std::gamma_distribution<double> gb((1.0 - mu) * d.param, 1.0);
  const double a = ga(gen);
  const double b = gb(gen);
  return a + b > 0.0 ? a / (a + b) : mu;
}

}  // namespace rbocoop
