#include "rbocoop/network.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

#include "rbocoop/error.hpp"

namespace rbocoop {

Network::Network(int agents, const std::vector<std::pair<int, int>>& edges) {
  if (agents < 1) throw ConfigError("graph.agents", "must be a positive integer");
  closed_.assign(static_cast<std::size_t>(agents), {});
  for (int k = 0; k < agents; ++k) closed_[static_cast<std::size_t>(k)].push_back(k);
  for (auto [a, b] : edges) {
    if (a < 0 || a >= agents || b < 0 || b >= agents)
      throw ConfigError("graph.edges", fmt::format("edge ({}, {}) references an unknown agent", a + 1, b + 1));
    if (a == b) continue;
    closed_[static_cast<std::size_t>(a)].push_back(b);
    closed_[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& nb : closed_) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
}

Network Network::complete(int agents) {
  std::vector<std::pair<int, int>> e;
  for (int a = 0; a < agents; ++a)
    for (int b = a + 1; b < agents; ++b) e.emplace_back(a, b);
  return Network(agents, e);
}

Network Network::path(int agents) {
  std::vector<std::pair<int, int>> e;
  for (int a = 0; a + 1 < agents; ++a) e.emplace_back(a, a + 1);
  return Network(agents, e);
}

Network Network::star(int agents) {
  std::vector<std::pair<int, int>> e;
  for (int a = 1; a < agents; ++a) e.emplace_back(0, a);
  return Network(agents, e);
}

Network Network::ring(int agents) {
  std::vector<std::pair<int, int>> e;
  for (int a = 0; a < agents; ++a) e.emplace_back(a, (a + 1) % agents);
  return Network(agents, e);
}

Network Network::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("agents") || !j["agents"].is_number_integer())
    throw ParseError(0, "graph.agents: missing or not an integer");
  const int agents = j["agents"].get<int>();
  std::vector<std::pair<int, int>> edges;
  if (j.contains("edges")) {
    const auto& es = j["edges"];
    if (!es.is_array()) throw ParseError(0, "graph.edges: expected an array");
    for (std::size_t i = 0; i < es.size(); ++i) {
      const auto& e = es[i];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
        throw ParseError(0, fmt::format("graph.edges[{}]: expected [k, j] with integer agents", i));
      edges.emplace_back(e[0].get<int>() - 1, e[1].get<int>() - 1);
    }
  }
  return Network(agents, edges);
}

nlohmann::json Network::to_json() const {
  nlohmann::json edges = nlohmann::json::array();
  for (int k = 0; k < agents(); ++k)
    for (int j : closed_[static_cast<std::size_t>(k)])
      if (j > k) edges.push_back({k + 1, j + 1});
  return {{"agents", agents()}, {"edges", edges}};
}

void Network::check_agent(int k) const {
  if (k < 0 || k >= agents()) throw std::out_of_range(fmt::format("agent {} outside [0, {})", k, agents()));
}

int Network::degree(int k) const {
  check_agent(k);
  return static_cast<int>(closed_[static_cast<std::size_t>(k)].size()) - 1;
}

double Network::avg_neighbor_degree(int k) const {
  const int eta = degree(k);
  if (eta < 1) throw ConfigError("graph", fmt::format("agent {} has no neighbours", k + 1));
  double total = 0.0;
  for (int j : closed_[static_cast<std::size_t>(k)])
    if (j != k) total += degree(j);
  return total / eta;
}

double Network::alpha(int k) const {
  const double eta = degree(k);
  return (eta - avg_neighbor_degree(k)) / eta;
}

const std::vector<int>& Network::neighbors(int k) const {
  check_agent(k);
  return closed_[static_cast<std::size_t>(k)];
}

bool Network::adjacent(int k, int j) const {
  const auto& nb = neighbors(k);
  return std::binary_search(nb.begin(), nb.end(), j);
}

std::vector<std::vector<int>> Network::observation_matrix() const {
  std::vector<std::vector<int>> w(static_cast<std::size_t>(agents()), std::vector<int>(static_cast<std::size_t>(agents()), 0));
  for (int k = 0; k < agents(); ++k)
    for (int j : closed_[static_cast<std::size_t>(k)]) w[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = 1;
  return w;
}

std::vector<std::string> Network::assumption_violations() const {
  std::vector<std::string> out;
  for (int k = 0; k < agents(); ++k) {
    if (degree(k) < 1) {
      out.push_back(fmt::format("agent {} is isolated (η_k = 0)", k + 1));
      continue;
    }
    const double avg = avg_neighbor_degree(k);
    if (!(avg < 2.0 * degree(k)))
      out.push_back(fmt::format("agent {}: η_avg = {} ≥ 2η_k = {} so α^k = {} is outside (-1, 1)", k + 1, avg,
                                2 * degree(k), alpha(k)));
  }
  return out;
}

std::vector<std::string> Network::validate(AssumptionMode mode) const {
  for (int k = 0; k < agents(); ++k)
    if (degree(k) < 1) throw ConfigError("graph", fmt::format("agent {} is isolated (η_k = 0)", k + 1));
  auto v = assumption_violations();
  if (mode == AssumptionMode::Strict && !v.empty()) throw ConfigError("graph", v.front());
  return v;
}

std::string to_string(AssumptionMode mode) { return mode == AssumptionMode::Strict ? "strict" : "permissive"; }

AssumptionMode parse_assumption_mode(const std::string& s) {
  if (s == "strict") return AssumptionMode::Strict;
  if (s == "permissive") return AssumptionMode::Permissive;
  throw ConfigError("graph.assumption", "expected \"strict\" or \"permissive\"");
}

}  // namespace rbocoop
