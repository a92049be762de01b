#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "netdiff/chain.hpp"
#include "netdiff/graph.hpp"
#include "netdiff/model.hpp"
#include "netdiff/random.hpp"

namespace netdiff {

/// log B(a) = sum_h lgamma(a_h) - lgamma(sum_h a_h).
double log_multivariate_beta(std::span<const double> a);

/// Full conditional pr(T = 1 | G, y) with symmetric Dirichlet(alpha) mixing
/// priors, evaluated with log multivariate beta functions.
double posterior_h1_probability(std::span<const int> counts_group1, std::span<const int> counts_group2,
                                double alpha, double prior_h1);

/// Multiplicative inverse gamma prior draw: lambda_r = prod_{m <= r} 1 / theta_m.
Eigen::VectorXd draw_mig(int rank, double a1, double a2, Rng& rng);

/// One conjugate update of a scalar log-odds psi ~ N(prior_mean, prior_var)
/// given Polya-gamma augmented Bernoulli data summarised by sum(kappa) and sum(omega).
double draw_augmented_logodds(double kappa_sum, double omega_sum, double prior_mean, double prior_var, Rng& rng);

/// Five-step Gibbs sweep for the dependent mixture of low-rank factorizations.
/// Holds per-dataset precomputations and scratch buffers; a sampler must not be
/// shared between threads.
class GibbsSampler {
 public:
  GibbsSampler(const NetworkDataset& data, Hyperparameters hyper, PgMethod pg = PgMethod::exact);

  MixtureModelState initialize(Rng& rng) const;
  /// Initial state drawn entirely from the prior (used for joint-distribution checks).
  MixtureModelState draw_prior(Rng& rng) const;
  void step(MixtureModelState& state, Rng& rng);

  /// Component edge probabilities of the state after the last sweep (L x H).
  const Eigen::MatrixXd& component_probs() const { return pi_; }

  const Hyperparameters& hyper() const { return hyper_; }

 private:
  void refresh_probabilities(const MixtureModelState& s);
  void update_group_probability(MixtureModelState& s, Rng& rng) const;
  void update_assignments(MixtureModelState& s, Rng& rng) const;
  void update_factors(MixtureModelState& s, Rng& rng);
  void update_indicator(MixtureModelState& s, Rng& rng) const;
  void update_mixing(MixtureModelState& s, Rng& rng) const;

  const NetworkDataset& data_;
  Hyperparameters hyper_;
  PgMethod pg_;
  std::shared_ptr<const EdgeIndex> index_;
  Eigen::MatrixXd edges_;  // n x L
  int n1_ = 0;
  int n2_ = 0;

  // scratch
  std::vector<Eigen::MatrixXd> w_;  // per component, v x r: x * sqrt(lambda)
  Eigen::MatrixXd d_;               // L x H low-rank log-odds
  Eigen::MatrixXd pi_;              // L x H
  Eigen::MatrixXd successes_;       // L x H edge counts per component
  Eigen::MatrixXd omega_;           // L x H summed PG draws
  std::vector<int> occupancy_;
};

/// Functional form of GibbsSampler::step.
MixtureModelState gibbs_step(MixtureModelState state, const NetworkDataset& data, const Hyperparameters& hyper,
                             Rng& rng);

/// Runs one chain: initialise, sweep n_iter times, store thinned post-burn-in
/// functionals. Throws NumericalError naming the iteration on a non-finite state.
PosteriorChain run_chain(const NetworkDataset& data, const Hyperparameters& hyper, const GibbsConfig& config,
                         Rng& rng, int chain_index = 0);

/// config.n_chains chains with streams (seed, chain index), up to `threads` at a time.
std::vector<PosteriorChain> run_chains(const NetworkDataset& data, const Hyperparameters& hyper,
                                       const GibbsConfig& config, int threads = 1);

}  // namespace netdiff
