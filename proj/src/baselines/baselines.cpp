#include "netdiff/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <boost/math/distributions/fisher_f.hpp>

#include "netdiff/errors.hpp"

namespace netdiff {

namespace {

double log_choose(std::int64_t n, std::int64_t k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

double fisher_exact_two_sided(const ContingencyTable2x2& t) {
  if (t.a < 0 || t.b < 0 || t.c < 0 || t.d < 0) throw ContractError("fisher_exact_two_sided: negative count");
  const std::int64_t r1 = t.a + t.b;
  const std::int64_t r2 = t.c + t.d;
  const std::int64_t c1 = t.a + t.c;
  const std::int64_t c2 = t.b + t.d;
  if (r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0) return 1.0;

  const std::int64_t lo = std::max<std::int64_t>(0, c1 - r2);
  const std::int64_t hi = std::min(r1, c1);
  std::vector<double> logp;
  logp.reserve(hi - lo + 1);
  for (std::int64_t x = lo; x <= hi; ++x) logp.push_back(log_choose(r1, x) + log_choose(r2, c1 - x));
  const double top = *std::max_element(logp.begin(), logp.end());
  const double observed = logp[t.a - lo];
  double total = 0.0;
  double tail = 0.0;
  for (double lp : logp) {
    const double w = std::exp(lp - top);
    total += w;
    if (lp <= observed + std::log1p(1e-7)) tail += w;
  }
  return std::min(1.0, tail / total);
}

double calibrate_p(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ContractError("calibrate_p: p-value outside [0, 1]");
  p = std::max(p, std::numeric_limits<double>::denorm_min());
  if (p >= std::exp(-1.0)) return 0.5;
  return 1.0 / (1.0 - std::exp(1.0) * p * std::log(p));
}

std::vector<double> bh_adjusted(std::span<const double> pvals) {
  const std::size_t m = pvals.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return pvals[i] < pvals[j]; });
  std::vector<double> adjusted(m);
  double running = 1.0;
  for (std::size_t k = m; k-- > 0;) {
    running = std::min(running, pvals[order[k]] * static_cast<double>(m) / static_cast<double>(k + 1));
    adjusted[order[k]] = running;
  }
  return adjusted;
}

std::vector<bool> benjamini_hochberg(std::span<const double> pvals, double q) {
  if (!(q > 0.0 && q < 1.0)) throw ContractError("benjamini_hochberg: q must lie in (0, 1)");
  const std::size_t m = pvals.size();
  std::vector<double> sorted(pvals.begin(), pvals.end());
  std::sort(sorted.begin(), sorted.end());
  double cut = -1.0;
  for (std::size_t k = m; k-- > 0;) {
    if (sorted[k] <= static_cast<double>(k + 1) * q / static_cast<double>(m)) {
      cut = sorted[k];
      break;
    }
  }
  std::vector<bool> reject(m);
  for (std::size_t i = 0; i < m; ++i) reject[i] = pvals[i] <= cut;
  return reject;
}

std::vector<ContingencyTable2x2> edge_tables(const NetworkDataset& data) {
  const std::size_t length = pair_count(data.v);
  std::vector<ContingencyTable2x2> tables(length);
  const auto n1 = static_cast<std::int64_t>(data.group_count(1));
  const auto n2 = static_cast<std::int64_t>(data.group_count(2));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto bits = data.networks[i].bits();
    for (std::size_t l = 0; l < length; ++l) (data.groups[i] == 1 ? tables[l].a : tables[l].c) += bits[l];
  }
  for (auto& t : tables) {
    t.b = n1 - t.a;
    t.d = n2 - t.c;
  }
  return tables;
}

std::size_t FisherEdgeTests::rejections() const { return std::count(reject.begin(), reject.end(), true); }

FisherEdgeTests fisher_edge_tests(const NetworkDataset& data, double q) {
  FisherEdgeTests out;
  out.q = q;
  for (const auto& t : edge_tables(data)) {
    out.p.push_back(fisher_exact_two_sided(t));
    out.calibrated.push_back(calibrate_p(out.p.back()));
  }
  out.adjusted = bh_adjusted(out.p);
  out.reject = benjamini_hochberg(out.p, q);
  return out;
}

ManovaResult manova_two_group(const Eigen::MatrixXd& x, std::span<const int> groups,
                              const std::vector<std::string>& names, double alpha) {
  if (static_cast<std::size_t>(x.rows()) != groups.size() || static_cast<std::size_t>(x.cols()) != names.size()) {
    throw ContractError("manova_two_group: dimension mismatch");
  }
  ManovaResult out;
  out.alpha = alpha;
  const Eigen::Index n = x.rows();
  Eigen::Index n1 = 0;
  for (int g : groups) n1 += g == 1;
  const Eigen::Index n2 = n - n1;

  auto within_sscp = [&](const std::vector<Eigen::Index>& cols) {
    const auto p = static_cast<Eigen::Index>(cols.size());
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p, p);
    for (int g = 1; g <= 2; ++g) {
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
      Eigen::Index count = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (groups[i] != g) continue;
        for (Eigen::Index k = 0; k < p; ++k) mean[k] += x(i, cols[k]);
        ++count;
      }
      if (count == 0) continue;
      mean /= static_cast<double>(count);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (groups[i] != g) continue;
        Eigen::VectorXd d(p);
        for (Eigen::Index k = 0; k < p; ++k) d[k] = x(i, cols[k]) - mean[k];
        w += d * d.transpose();
      }
    }
    return w;
  };

  // Greedy selection: keep a statistic only if it is finite and the pooled
  // within-group SSCP stays well conditioned.
  std::vector<Eigen::Index> cols;
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    if (!x.col(k).allFinite()) {
      out.dropped.push_back(names[k]);
      continue;
    }
    auto trial = cols;
    trial.push_back(k);
    const Eigen::MatrixXd w = within_sscp(trial);
    const Eigen::VectorXd scale = w.diagonal().cwiseSqrt();
    bool ok = (scale.array() > 1e-12).all();
    if (ok) {
      const Eigen::MatrixXd corr = scale.cwiseInverse().asDiagonal() * w * scale.cwiseInverse().asDiagonal();
      ok = corr.determinant() > 1e-10;
    }
    if (ok) {
      cols = std::move(trial);
      out.used.push_back(names[k]);
    } else {
      out.dropped.push_back(names[k]);
    }
  }
  const auto p = static_cast<Eigen::Index>(cols.size());
  if (p == 0 || n1 == 0 || n2 == 0 || n - p - 1 <= 0) return out;

  const Eigen::MatrixXd w = within_sscp(cols);
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd grand = Eigen::VectorXd::Zero(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < p; ++k) grand[k] += x(i, cols[k]);
  }
  grand /= static_cast<double>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd d(p);
    for (Eigen::Index k = 0; k < p; ++k) d[k] = x(i, cols[k]) - grand[k];
    total += d * d.transpose();
  }
  const double log_det_w = Eigen::LLT<Eigen::MatrixXd>(w).matrixLLT().diagonal().array().log().sum() * 2.0;
  Eigen::LLT<Eigen::MatrixXd> chol_t(total);
  const double log_det_t = chol_t.matrixLLT().diagonal().array().log().sum() * 2.0;
  out.wilks = std::clamp(std::exp(log_det_w - log_det_t), 0.0, 1.0);
  out.df1 = static_cast<double>(p);
  out.df2 = static_cast<double>(n - p - 1);
  out.f = out.wilks > 0.0 ? (1.0 - out.wilks) / out.wilks * out.df2 / out.df1 : std::numeric_limits<double>::infinity();
  if (std::isfinite(out.f)) {
    boost::math::fisher_f_distribution<double> dist(out.df1, out.df2);
    out.p_value = boost::math::cdf(boost::math::complement(dist, out.f));
  } else {
    out.p_value = 0.0;
  }
  out.reject = out.p_value < alpha;
  return out;
}

Eigen::MatrixXd summary_matrix(const NetworkDataset& data) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(data.size()), 4);
  const std::span<const int> blocks = data.blocks ? std::span<const int>(*data.blocks) : std::span<const int>{};
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto s = summary_stats(data.networks[i], blocks);
    x.row(static_cast<Eigen::Index>(i)) << s.density, s.transitivity, s.avg_path_length,
        s.assortativity.value_or(std::numeric_limits<double>::quiet_NaN());
  }
  return x;
}

ManovaResult manova_summary_test(const NetworkDataset& data, double alpha) {
  return manova_two_group(summary_matrix(data), data.groups,
                          {"density", "transitivity", "avg_path_length", "assortativity"}, alpha);
}

nlohmann::json to_json(const FisherEdgeTests& f) {
  return {{"q", f.q},
          {"p_values", f.p},
          {"bh_adjusted", f.adjusted},
          {"calibrated", f.calibrated},
          {"decisions", f.reject},
          {"rejections", f.rejections()}};
}

nlohmann::json to_json(const ManovaResult& m) {
  return {{"wilks_lambda", m.wilks}, {"f", m.f},           {"df1", m.df1},       {"df2", m.df2},
          {"p_value", m.p_value},    {"alpha", m.alpha},   {"reject", m.reject}, {"statistics_used", m.used},
          {"statistics_dropped", m.dropped}};
}

}  // namespace netdiff
