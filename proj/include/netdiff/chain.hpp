#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "netdiff/polya_gamma.hpp"

namespace netdiff {

struct Hyperparameters {
  int h_max = 10;
  int r_max = 10;
  double beta_a = 0.5;
  double beta_b = 0.5;
  double z_mean = 0.0;
  double z_var = 10.0;
  double mig_a1 = 2.5;
  double mig_a2 = 3.5;
  double prior_h1 = 0.5;
  std::optional<double> dirichlet_conc;  // defaults to 1 / h_max

  double concentration() const { return dirichlet_conc.value_or(1.0 / h_max); }
  void validate() const;
};

struct GibbsConfig {
  int n_iter = 5000;
  int burn_in = 1000;
  int thin = 1;
  std::uint64_t seed = 1;
  int n_chains = 1;
  /// Keep full parameter snapshots (for prediction) every this many stored draws.
  int snapshot_thin = 10;
  PgMethod pg_method = PgMethod::exact;
  /// Simulate one posterior-predictive network per group at every stored draw.
  bool predictive = true;

  std::size_t stored() const;
  void validate() const;
};

/// Parameters needed to evaluate the group-conditional pmfs at one draw.
struct ParameterSnapshot {
  double p_y1 = 0.5;
  Eigen::VectorXd nu1;
  Eigen::VectorXd nu2;
  Eigen::MatrixXd pi;  // L x H component edge probabilities
};

/// Column order of the posterior-predictive matrices.
inline constexpr std::array<const char*, 5> kPredictiveColumns{
    "density", "transitivity", "avg_path_length", "assortativity", "between_block_edges"};

/// Stored draws of label-invariant functionals from one chain; row k of every
/// matrix is stored draw k.
struct PosteriorChain {
  int v = 0;
  int h = 0;
  int chain_index = 0;
  Hyperparameters hyper;
  GibbsConfig config;

  std::vector<int> t;
  std::vector<double> p_y1;
  Eigen::MatrixXd nu1, nu2;                // draws x H
  Eigen::MatrixXd pibar1, pibar2, rho;     // draws x L
  Eigen::MatrixXd occupancy;               // draws x H, observations per component
  std::vector<ParameterSnapshot> snapshots;
  std::array<Eigen::MatrixXd, 2> predictive;  // draws x 5 per group, may be empty

  std::size_t size() const { return t.size(); }
  double h1_fraction() const;
};

/// Draws of several chains stacked in chain order.
PosteriorChain concatenate(std::span<const PosteriorChain> chains);

/// Directory layout: metadata.json plus one CSV per functional (rows = stored draws).
void save_chain(const PosteriorChain& chain, const std::filesystem::path& dir);
PosteriorChain load_chain(const std::filesystem::path& dir);

/// Chains stored as `dir/chain_<k>` subdirectories, or `dir` itself when it is a chain.
std::vector<PosteriorChain> load_chains(const std::filesystem::path& dir);

}  // namespace netdiff
