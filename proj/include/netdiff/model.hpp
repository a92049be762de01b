#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "netdiff/graph.hpp"
#include "netdiff/random.hpp"

namespace netdiff {

/// Edge probabilities, one per node pair; entries lie strictly inside (0, 1).
using EdgeProbabilities = Eigen::VectorXd;

/// Probabilities are kept inside [kProbFloor, 1 - kProbFloor] before any log.
inline constexpr double kProbFloor = 1e-12;

double logistic(double x);
double logit(double p);

/// Latent coordinates X (v x r) and nonnegative weights lambda (r) of one component.
struct ComponentFactors {
  Eigen::MatrixXd x;
  Eigen::VectorXd lambda;

  int rank() const { return static_cast<int>(lambda.size()); }
  void validate(int v) const;
};

/// One state of the dependent mixture. Groups are 1 and 2; component indices
/// and assignments are 0-based.
struct MixtureModelState {
  int v = 0;
  double p_y1 = 0.5;
  std::array<Eigen::VectorXd, 2> nu;  // mixing vector per group
  Eigen::VectorXd upsilon;            // shared mixing vector
  int t = 1;                          // 0 = equal mixing, 1 = group-specific
  Eigen::VectorXd z;                  // shared log-odds, length v(v-1)/2
  std::vector<ComponentFactors> components;
  std::vector<int> g;  // component of each observation

  int h() const { return static_cast<int>(components.size()); }
  double p_y(int y) const { return y == 1 ? p_y1 : 1.0 - p_y1; }
  const Eigen::VectorXd& mixing(int y) const { return nu[static_cast<std::size_t>(y - 1)]; }
  /// Throws ContractError on any broken invariant.
  void validate() const;
};

/// pi_l = logistic(z_l + sum_r lambda_r x_vr x_ur) for every pair l = (v, u).
EdgeProbabilities component_edge_probs(const Eigen::VectorXd& z, const ComponentFactors& c);

/// L x H matrix whose column h is component_edge_probs for component h.
Eigen::MatrixXd component_probability_matrix(const MixtureModelState& s);

/// Log-space Bernoulli-product likelihoods for a fixed set of component
/// probability vectors (columns of `pi`).
class MixtureLikelihood {
 public:
  explicit MixtureLikelihood(const Eigen::MatrixXd& pi);

  int components() const { return static_cast<int>(log_p_.cols()); }
  double component_log_likelihood(const EdgeVector& a, int h) const;
  /// log sum_h nu_h prod_l pi_lh^a_l (1 - pi_lh)^(1 - a_l)
  double log_pmf(const EdgeVector& a, const Eigen::VectorXd& nu) const;

 private:
  Eigen::MatrixXd log_p_;
  Eigen::MatrixXd log_q_;
};

double mixture_log_pmf(const EdgeVector& a, int y, const MixtureModelState& s);
double mixture_pmf(const EdgeVector& a, int y, const MixtureModelState& s);

/// Group mean network: sum_h nu_hy pi^(h).
EdgeProbabilities group_edge_probs(const MixtureModelState& s, int y);
EdgeProbabilities group_edge_probs(const Eigen::MatrixXd& pi, const Eigen::VectorXd& nu_y);
/// Unconditional edge probabilities: sum_y p_Y(y) sum_h nu_hy pi^(h).
EdgeProbabilities marginal_edge_probs(const MixtureModelState& s);

/// Model-based Cramer's V between the group label and edge l.
double cramers_v(const MixtureModelState& s, std::size_t l);
double cramers_v(double p_y1, double pibar1, double pibar2);
Eigen::VectorXd cramers_v(double p_y1, const EdgeProbabilities& pibar1, const EdgeProbabilities& pibar2);

struct SampledNetwork {
  EdgeVector edges;
  int component;
};

/// G ~ Categorical(nu_y), then independent Bernoulli edges from pi^(G).
SampledNetwork sample_network(const MixtureModelState& s, int y, Rng& rng);
/// Same mechanism with explicit component probabilities (columns of `pi`, may hit 0 or 1).
SampledNetwork sample_network(const Eigen::MatrixXd& pi, const Eigen::VectorXd& nu_y, Rng& rng);

/// Exhaustive pmf over all 2^(v(v-1)/2) configurations; bit l of the table
/// index is a_l. Refused (ContractError) for v > 5.
std::vector<double> enumerate_pmf(const MixtureModelState& s, int y);
std::vector<double> enumerate_pmf(const Eigen::MatrixXd& pi, const Eigen::VectorXd& nu_y);

/// Configuration for table index `code` on `v` nodes.
EdgeVector configuration(int v, std::size_t code);

}  // namespace netdiff
