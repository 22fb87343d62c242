#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace rbocoop {

/// How a run treats a violation of η_k^avg < 2η_k (equivalently α^k > −1).
enum class AssumptionMode { Strict, Permissive };

/// Undirected agent graph with a self-inclusive observation matrix.
/// Immutable after construction.
class Network {
 public:
  /// `edges` are 0-based agent pairs; they are symmetrized and self-loops
  /// are ignored (the diagonal of W is always 1).
  Network(int agents, const std::vector<std::pair<int, int>>& edges);

  static Network complete(int agents);
  static Network path(int agents);
  static Network star(int agents);  ///< agent 0 is the centre
  static Network ring(int agents);

  /// Reads `{agents: K, edges: [[k,j], ...]}` with 1-based indices.
  static Network from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  int agents() const noexcept { return static_cast<int>(closed_.size()); }

  /// η_k: neighbours excluding the agent itself.
  int degree(int k) const;

  /// η_k^avg: mean degree of k's neighbours (self excluded). Requires η_k ≥ 1.
  double avg_neighbor_degree(int k) const;

  /// α^k = (η_k − η_k^avg) / η_k. Requires η_k ≥ 1.
  double alpha(int k) const;

  /// 𝒩_k including k itself, ascending.
  const std::vector<int>& neighbors(int k) const;

  bool adjacent(int k, int j) const;

  /// K×K 0/1 matrix W with unit diagonal.
  std::vector<std::vector<int>> observation_matrix() const;

  /// Human-readable violations of the cooperative-run preconditions
  /// (isolated agents, α^k ∉ (−1, 1)). Empty when all hold.
  std::vector<std::string> assumption_violations() const;

  /// Strict: throws ConfigError on the first violation. Permissive: returns
  /// the violations as warnings, except isolated agents which always throw.
  std::vector<std::string> validate(AssumptionMode mode) const;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  void check_agent(int k) const;

  std::vector<std::vector<int>> closed_;  // closed neighbourhoods, ascending
};

std::string to_string(AssumptionMode mode);
AssumptionMode parse_assumption_mode(const std::string& s);

}  // namespace rbocoop
