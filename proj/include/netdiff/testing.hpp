#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "netdiff/chain.hpp"
#include "netdiff/graph.hpp"
#include "netdiff/model.hpp"

namespace netdiff {

struct GlobalTest {
  double pr_h1 = 0.0;
  double mcse = 0.0;  // sqrt(p (1 - p) / ESS(T)); informational only
  double threshold = 0.9;
  bool reject = false;
};

/// pr(H1 | data) as the mean of the stored T draws; reject when it exceeds `threshold`.
GlobalTest global_test(const PosteriorChain& chain, double threshold = 0.9);

struct LocalTests {
  double epsilon = 0.1;
  double threshold = 0.9;
  Eigen::VectorXd pr;        // pr(rho_l > epsilon | data), one per edge
  std::vector<bool> reject;  // pr[l] > threshold
  std::size_t rejections() const;
};

LocalTests local_tests(const PosteriorChain& chain, double epsilon = 0.1, double threshold = 0.9);

struct FdrCutoff {
  std::optional<double> cutoff;  // reject {l : pr[l] >= cutoff}; empty = no rejection possible
  std::size_t rejected = 0;
  double expected_fdr = 0.0;
};

/// Largest rejection set {pr >= cutoff} whose mean (1 - pr) is at most `target_fdr`;
/// the cutoff is the smallest rejected probability.
FdrCutoff bayes_fdr_threshold(std::span<const double> local_pr, double target_fdr);

/// pr(Y = 2 | a) for a single parameter value, in log space.
double predict_group(const MixtureModelState& state, const EdgeVector& a);
double predict_group(const ParameterSnapshot& draw, const EdgeVector& a);
/// Posterior predictive pr(Y = 2 | a), averaging the per-draw class probability
/// over the stored parameter snapshots.
double predict_group(const PosteriorChain& chain, const EdgeVector& a);
Eigen::VectorXd predict_group(const PosteriorChain& chain, std::span<const EdgeVector> networks);

struct TestReport {
  GlobalTest global;
  LocalTests local;
  std::optional<double> fdr_target;
  std::optional<FdrCutoff> fdr;
  nlohmann::json baselines;  // null when no baseline was run
};

nlohmann::json to_json(const TestReport& report);

/// Per-edge values arranged as a symmetric v x v matrix with `diagonal` on the diagonal.
Eigen::MatrixXd edge_matrix(int v, const Eigen::VectorXd& values, double diagonal = 0.0);

}  // namespace netdiff
