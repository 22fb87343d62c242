#include "rbocoop/env.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "rbocoop/error.hpp"

namespace rbocoop {

using nlohmann::json;

EnvironmentSpec::EnvironmentSpec(std::int64_t horizon, int arms, std::vector<Segment> segments,
                                 RewardFamily family)
    : horizon_(horizon), arms_(arms), segments_(std::move(segments)), family_(family) {
  if (horizon_ < 1) throw ConfigError("horizon", "must be a positive integer");
  if (arms_ < 1) throw ConfigError("arms", "must be a positive integer");
  if (segments_.empty()) throw ConfigError("segments", "at least one segment is required");
  if (segments_.front().start != 1) throw ConfigError("segments[0].start", "first segment must start at step 1");

  for (std::size_t n = 0; n < segments_.size(); ++n) {
    const Segment& seg = segments_[n];
    const std::string where = fmt::format("segments[{}]", n);
    if (n > 0 && seg.start <= segments_[n - 1].start)
      throw ConfigError(where + ".start", "segment starts must be strictly increasing");
    if (seg.start > horizon_) throw ConfigError(where + ".start", "segment starts after the horizon");
    if (seg.means.size() != static_cast<std::size_t>(arms_))
      throw ConfigError(where + ".means", fmt::format("expected {} means, got {}", arms_, seg.means.size()));
    for (std::size_t m = 0; m < seg.means.size(); ++m) {
      if (!(seg.means[m] >= 0.0 && seg.means[m] <= 1.0))
        throw ConfigError(fmt::format("{}.means[{}]", where, m), "mean must lie in [0,1]");
    }
    if (n > 0 && seg.means == segments_[n - 1].means)
      throw ConfigError(where, "consecutive segments have identical means (they are one segment)");
    if (!seg.samplers.empty()) {
      if (family_ != RewardFamily::BoundedGeneric)
        throw ConfigError(where + ".samplers", "samplers are only allowed for the bounded family");
      if (seg.samplers.size() != static_cast<std::size_t>(arms_))
        throw ConfigError(where + ".samplers", fmt::format("expected {} samplers", arms_));
      for (std::size_t m = 0; m < seg.samplers.size(); ++m) {
        const SamplerDescriptor& d = seg.samplers[m];
        const bool ok = d.kind == SamplerDescriptor::Kind::Mixture ? (d.param >= 0.0 && d.param <= 1.0)
                                                                   : d.param > 0.0;
        if (!ok) throw ConfigError(fmt::format("{}.samplers[{}]", where, m), "sampler parameter out of range");
      }
    }
  }
}

std::vector<std::int64_t> EnvironmentSpec::change_points() const {
  std::vector<std::int64_t> out;
  out.reserve(segments_.size());
  for (const Segment& s : segments_) out.push_back(s.start);
  return out;
}

void EnvironmentSpec::check_step(std::int64_t t) const {
  if (t < 1 || t > horizon_)
    throw std::out_of_range(fmt::format("step {} outside [1, {}]", t, horizon_));
}

void EnvironmentSpec::check_arm(int arm) const {
  if (arm < 0 || arm >= arms_) throw std::out_of_range(fmt::format("arm {} outside [0, {})", arm, arms_));
}

int EnvironmentSpec::segment_index(std::int64_t t) const {
  check_step(t);
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](std::int64_t v, const Segment& s) { return v < s.start; });
  return static_cast<int>(it - segments_.begin()) - 1;
}

double EnvironmentSpec::mean_at(std::int64_t t, int arm) const {
  check_arm(arm);
  return segments_[static_cast<std::size_t>(segment_index(t))].means[static_cast<std::size_t>(arm)];
}

int EnvironmentSpec::optimal_arm(std::int64_t t) const {
  const auto& means = segments_[static_cast<std::size_t>(segment_index(t))].means;
  return static_cast<int>(std::max_element(means.begin(), means.end()) - means.begin());
}

const SamplerDescriptor& EnvironmentSpec::sampler(int segment, int arm) const {
  static const SamplerDescriptor kDefault{};
  const auto& s = segments_[static_cast<std::size_t>(segment)].samplers;
  return s.empty() ? kDefault : s[static_cast<std::size_t>(arm)];
}

std::string to_string(RewardFamily family) {
  return family == RewardFamily::Bernoulli ? "bernoulli" : "bounded";
}

// ---- JSON -----------------------------------------------------------------

namespace {

[[noreturn]] void structural(const std::string& field, const std::string& msg) {
  throw ParseError(0, field + ": " + msg);
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) structural(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) structural(where.empty() ? key : where + "." + key, "missing field");
  return *it;
}

std::int64_t as_int(const json& v, const std::string& field) {
  if (!v.is_number_integer()) structural(field, "expected an integer");
  return v.get<std::int64_t>();
}

double as_number(const json& v, const std::string& field) {
  if (!v.is_number()) structural(field, "expected a number");
  return v.get<double>();
}

SamplerDescriptor sampler_from_json(const json& j, const std::string& field) {
  SamplerDescriptor d;
  const std::string type = require(j, "type", field).is_string() ? j["type"].get<std::string>() : "";
  if (type == "mixture") {
    d.kind = SamplerDescriptor::Kind::Mixture;
    d.param = j.contains("weight") ? as_number(j["weight"], field + ".weight") : 0.5;
  } else if (type == "beta") {
    d.kind = SamplerDescriptor::Kind::Beta;
    d.param = as_number(require(j, "concentration", field), field + ".concentration");
  } else {
    structural(field + ".type", "expected \"mixture\" or \"beta\"");
  }
  return d;
}

}  // namespace

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
    throw ParseError(line, e.what());
  }
}

EnvironmentSpec spec_from_json(const json& j) {
  const std::int64_t horizon = as_int(require(j, "horizon", ""), "horizon");
  const std::int64_t arms = as_int(require(j, "arms", ""), "arms");
  RewardFamily family = RewardFamily::Bernoulli;
  if (j.contains("family")) {
    const json& f = j["family"];
    if (!f.is_string()) structural("family", "expected a string");
    const auto s = f.get<std::string>();
    if (s == "bernoulli") family = RewardFamily::Bernoulli;
    else if (s == "bounded") family = RewardFamily::BoundedGeneric;
    else structural("family", "expected \"bernoulli\" or \"bounded\"");
  }
  const json& segs = require(j, "segments", "");
  if (!segs.is_array()) structural("segments", "expected an array");

  std::vector<Segment> segments;
  for (std::size_t n = 0; n < segs.size(); ++n) {
    const std::string where = fmt::format("segments[{}]", n);
    Segment seg;
    seg.start = as_int(require(segs[n], "start", where), where + ".start");
    const json& means = require(segs[n], "means", where);
    if (!means.is_array()) structural(where + ".means", "expected an array");
    if (means.empty()) structural(where + ".means", "empty means row");
    for (std::size_t m = 0; m < means.size(); ++m)
      seg.means.push_back(as_number(means[m], fmt::format("{}.means[{}]", where, m)));
    if (segs[n].contains("samplers")) {
      const json& ss = segs[n]["samplers"];
      if (!ss.is_array()) structural(where + ".samplers", "expected an array");
      for (std::size_t m = 0; m < ss.size(); ++m)
        seg.samplers.push_back(sampler_from_json(ss[m], fmt::format("{}.samplers[{}]", where, m)));
    }
    segments.push_back(std::move(seg));
  }
  if (arms < 1 || arms > 1 << 15) throw ConfigError("arms", "must be in [1, 32768]");
  return EnvironmentSpec(horizon, static_cast<int>(arms), std::move(segments), family);
}

json spec_to_json(const EnvironmentSpec& spec) {
  json segs = json::array();
  for (const Segment& s : spec.segments()) {
    json js = {{"start", s.start}, {"means", s.means}};
    if (!s.samplers.empty()) {
      json ss = json::array();
      for (const SamplerDescriptor& d : s.samplers) {
        if (d.kind == SamplerDescriptor::Kind::Mixture) ss.push_back({{"type", "mixture"}, {"weight", d.param}});
        else ss.push_back({{"type", "beta"}, {"concentration", d.param}});
      }
      js["samplers"] = std::move(ss);
    }
    segs.push_back(std::move(js));
  }
  return {{"horizon", spec.horizon()},
          {"arms", spec.arms()},
          {"family", to_string(spec.family())},
          {"segments", std::move(segs)}};
}

EnvironmentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open environment file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const json j = parse_json_text(ss.str());
  // Run configs embed the environment under "environment".
  return spec_from_json(j.contains("environment") ? j["environment"] : j);
}

void save_spec(const EnvironmentSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write environment file " + path.string());
  out << spec_to_json(spec).dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

void write_mean_trajectories_csv(const EnvironmentSpec& spec, std::ostream& out) {
  out << 't';
  for (int m = 1; m <= spec.arms(); ++m) out << ",mean_" << m;
  out << '\n';
  for (std::int64_t t = 1; t <= spec.horizon(); ++t) {
    const auto& means = spec.segments()[static_cast<std::size_t>(spec.segment_index(t))].means;
    out << t;
    for (double mu : means) out << ',' << fmt::format("{}", mu);
    out << '\n';
  }
}

}  // namespace rbocoop
