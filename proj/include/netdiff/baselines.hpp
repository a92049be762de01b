#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "netdiff/graph.hpp"

namespace netdiff {

/// Rows are groups 1 and 2, columns edge present / absent.
struct ContingencyTable2x2 {
  std::int64_t a = 0;  // group 1, edge present
  std::int64_t b = 0;  // group 1, edge absent
  std::int64_t c = 0;  // group 2, edge present
  std::int64_t d = 0;  // group 2, edge absent
};

/// Sum of hypergeometric probabilities of all tables with the observed margins
/// that are no more probable than the observed one (relative tie tolerance 1e-7).
double fisher_exact_two_sided(const ContingencyTable2x2& t);

/// 1 / (1 - e p log p) for p < 1/e, otherwise 0.5.
double calibrate_p(double p);

/// Benjamini-Hochberg step-up rejections at level q.
std::vector<bool> benjamini_hochberg(std::span<const double> pvals, double q);
/// BH adjusted p-values: reject at level q exactly where adjusted <= q.
std::vector<double> bh_adjusted(std::span<const double> pvals);

std::vector<ContingencyTable2x2> edge_tables(const NetworkDataset& data);

struct FisherEdgeTests {
  double q = 0.1;
  std::vector<double> p;
  std::vector<double> adjusted;
  std::vector<double> calibrated;
  std::vector<bool> reject;
  std::size_t rejections() const;
};

FisherEdgeTests fisher_edge_tests(const NetworkDataset& data, double q = 0.1);

struct ManovaResult {
  double wilks = 1.0;
  double f = 0.0;
  double df1 = 0.0;
  double df2 = 0.0;
  double p_value = 1.0;
  double alpha = 0.1;
  bool reject = false;
  std::vector<std::string> used;
  std::vector<std::string> dropped;  // non-finite or collinear statistics
};

/// One-way two-group MANOVA via Wilks' lambda and its exact F transformation.
/// Columns of `x` that are non-finite or linearly dependent on earlier columns are dropped.
ManovaResult manova_two_group(const Eigen::MatrixXd& x, std::span<const int> groups,
                              const std::vector<std::string>& names, double alpha = 0.1);

/// MANOVA on (density, transitivity, average path length, block assortativity).
ManovaResult manova_summary_test(const NetworkDataset& data, double alpha = 0.1);

/// One row per network: the four summary statistics (assortativity NaN when undefined).
Eigen::MatrixXd summary_matrix(const NetworkDataset& data);

nlohmann::json to_json(const FisherEdgeTests& f);
nlohmann::json to_json(const ManovaResult& m);

}  // namespace netdiff
