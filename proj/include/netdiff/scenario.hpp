#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "netdiff/graph.hpp"

namespace netdiff {

/// One true mixture component: block-level log-odds offsets added to the base
/// block log-odds, plus low-rank factors (x may have zero columns).
struct ComponentSpec {
  Eigen::MatrixXd block_offset;  // B x B, symmetric
  Eigen::MatrixXd x;             // v x r
  Eigen::VectorXd lambda;        // r
};

struct ScenarioSpec {
  std::string name;
  int n = 50;
  int v = 20;
  std::vector<int> blocks;        // node -> block id (0-based)
  Eigen::MatrixXd block_logodds;  // B x B base log-odds
  std::vector<ComponentSpec> components;
  Eigen::VectorXd nu1;
  Eigen::VectorXd nu2;
  double p_y1 = 0.5;
  /// When >= 0 exactly this many observations get label 1 (in shuffled order);
  /// otherwise labels are drawn from Bernoulli(p_y1).
  int n_group1 = -1;
  std::vector<int> active_nodes;  // 0-based
  std::uint64_t seed = 1;

  int h_true() const { return static_cast<int>(components.size()); }
  int block_count() const { return static_cast<int>(block_logodds.rows()); }
  /// Shared base log-odds per edge.
  Eigen::VectorXd z() const;
  /// L x H true component edge probabilities.
  Eigen::MatrixXd component_probs() const;
  Eigen::VectorXd group_probs(int y) const;
  /// delta_l = 1 when the two group marginals of edge l differ.
  std::vector<int> truth() const;
  void validate() const;
};

struct SimulatedData {
  ScenarioSpec spec;
  NetworkDataset data;
  std::vector<int> delta;
  std::vector<int> components;  // true component of each observation (0-based)
};

SimulatedData simulate(const ScenarioSpec& spec);

/// Two blocks of ten nodes; five active nodes in the first block carry rank-one
/// factors whose sign patterns make the two components node permutations of
/// each other, so whole-network summaries carry no group signal.
ScenarioSpec scenario1_spec(bool dependent, std::uint64_t seed, int n = 50);
/// Three components that share within-block probability 0.75 and differ only in
/// between-block probability (0.5, 0.8, 0.2); group marginals coincide.
ScenarioSpec scenario2_spec(std::uint64_t seed, int n = 50);
/// 68 nodes in two hemispheres, n = 36 with a 19 / 17 split.
ScenarioSpec synthetic_v68_spec(std::uint64_t seed);

SimulatedData make_scenario1(bool dependent, std::uint64_t seed, int n = 50);
SimulatedData make_scenario2(std::uint64_t seed, int n = 50);

/// scenario1-dependent, scenario1-independent, scenario2, synthetic-v68.
/// Throws ContractError on an unknown name; n <= 0 keeps the scenario default.
ScenarioSpec scenario_by_name(const std::string& name, std::uint64_t seed, int n = 0);
const std::vector<std::string>& scenario_names();

void to_json(nlohmann::json& j, const ScenarioSpec& s);
void from_json(const nlohmann::json& j, ScenarioSpec& s);

}  // namespace netdiff
