#include "netdiff/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "netdiff/edge_index.hpp"
#include "netdiff/errors.hpp"

namespace netdiff {

namespace {

double mean_of(std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0) / x.size(); }

double sample_variance(std::span<const double> x, double mean) {
  double s = 0.0;
  for (double v : x) s += (v - mean) * (v - mean);
  return s / (x.size() - 1);
}

}  // namespace

namespace {

bool constant(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

}  // namespace

double psrf(const std::vector<std::vector<double>>& subchains) {
  if (subchains.size() < 2) throw ContractError("psrf: need at least two sub-chains");
  std::size_t n = subchains.front().size();
  for (const auto& c : subchains) n = std::min(n, c.size());
  if (n < 2) throw ContractError("psrf: sub-chains need at least two draws");
  const auto m = subchains.size();
  if (std::all_of(subchains.begin(), subchains.end(), [n](const auto& c) { return constant({c.data(), n}); })) {
    const bool equal = std::all_of(subchains.begin(), subchains.end(),
                                   [&](const auto& c) { return c.front() == subchains.front().front(); });
    return equal ? 1.0 : std::numeric_limits<double>::infinity();
  }

  std::vector<double> means(m);
  double within = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    std::span<const double> c(subchains[j].data(), n);
    means[j] = mean_of(c);
    within += sample_variance(c, means[j]);
  }
  within /= m;
  const double grand = mean_of(means);
  const double between = n * sample_variance(means, grand);
  if (within <= 0.0) return between <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  const double pooled = (n - 1.0) / n * within + between / n;
  return std::sqrt(pooled / within);
}

std::vector<std::vector<double>> split_chain(std::span<const double> draws, int parts) {
  if (parts < 1) throw ContractError("split_chain: parts must be >= 1");
  const std::size_t len = draws.size() / parts;
  std::vector<std::vector<double>> out;
  for (int p = 0; p < parts; ++p) {
    out.emplace_back(draws.begin() + p * len, draws.begin() + (p + 1) * len);
  }
  return out;
}

double ess(std::span<const double> draws) {
  const std::size_t n = draws.size();
  if (n < 2 || constant(draws)) return static_cast<double>(n);
  const double mean = mean_of(draws);
  std::vector<double> centred(n);
  for (std::size_t i = 0; i < n; ++i) centred[i] = draws[i] - mean;
  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += centred[i] * centred[i + lag];
    return s / n;
  };
  const double c0 = autocov(0);
  if (c0 <= 0.0) return static_cast<double>(n);

  double tau = -1.0;
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    const double pair = (autocov(2 * k) + autocov(2 * k + 1)) / c0;
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  return n / std::max(tau, 1.0 / n);
}

double DiagnosticsReport::max_psrf() const {
  double out = 1.0;
  for (const auto& f : functionals) out = std::max(out, f.psrf);
  return out;
}

double DiagnosticsReport::median_ess() const {
  if (functionals.empty()) return 0.0;
  std::vector<double> e;
  for (const auto& f : functionals) e.push_back(f.ess);
  std::sort(e.begin(), e.end());
  const auto k = e.size();
  return k % 2 ? e[k / 2] : 0.5 * (e[k / 2 - 1] + e[k / 2]);
}

std::size_t DiagnosticsReport::psrf_above(double cutoff) const {
  return std::count_if(functionals.begin(), functionals.end(),
                       [cutoff](const MonitoredFunctional& f) { return f.psrf >= cutoff; });
}

DiagnosticsReport diagnose(std::span<const PosteriorChain> chains, int parts) {
  if (chains.empty()) throw ContractError("diagnose: no chains");
  DiagnosticsReport report;
  report.subchains = parts * static_cast<int>(chains.size());
  for (const auto& c : chains) report.stored += c.size();
  const auto& index = *EdgeIndex::of(chains.front().v);

  auto monitor = [&](const std::string& name, Eigen::MatrixXd PosteriorChain::*field, Eigen::Index col) {
    std::vector<std::vector<double>> pieces;
    double total_ess = 0.0;
    for (const auto& c : chains) {
      const Eigen::VectorXd x = (c.*field).col(col);
      std::span<const double> draws(x.data(), static_cast<std::size_t>(x.size()));
      for (auto& piece : split_chain(draws, parts)) pieces.push_back(std::move(piece));
      total_ess += ess(draws);
    }
    report.functionals.push_back({name, psrf(pieces), total_ess});
  };

  for (std::size_t l = 0; l < index.size(); ++l) {
    auto [row, col] = index.pair(l);
    const auto pair = std::to_string(row + 1) + "_" + std::to_string(col + 1);
    monitor("rho_" + pair, &PosteriorChain::rho, l);
    monitor("pibar1_" + pair, &PosteriorChain::pibar1, l);
    monitor("pibar2_" + pair, &PosteriorChain::pibar2, l);
  }
  return report;
}

nlohmann::json to_json(const DiagnosticsReport& report) {
  nlohmann::json j;
  j["stored_draws"] = report.stored;
  j["subchains"] = report.subchains;
  j["max_psrf"] = report.max_psrf();
  j["median_ess"] = report.median_ess();
  j["psrf_at_least_1.1"] = report.psrf_above(1.1);
  auto& f = j["functionals"] = nlohmann::json::array();
  for (const auto& m : report.functionals) f.push_back({{"name", m.name}, {"psrf", m.psrf}, {"ess", m.ess}});
  return j;
}

}  // namespace netdiff
