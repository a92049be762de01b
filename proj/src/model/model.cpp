#include "netdiff/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "netdiff/errors.hpp"

namespace netdiff {

double logistic(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

void ComponentFactors::validate(int v) const {
  if (rank() < 1) throw ContractError("ComponentFactors: rank must be >= 1");
  if (x.rows() != v || x.cols() != rank()) {
    throw ContractError("ComponentFactors: x must be " + std::to_string(v) + " x " + std::to_string(rank()));
  }
  if ((lambda.array() < 0.0).any()) throw ContractError("ComponentFactors: lambda must be nonnegative");
}

void MixtureModelState::validate() const {
  const auto length = static_cast<Eigen::Index>(pair_count(v));
  if (v < 2) throw ContractError("state: v must be >= 2");
  if (!(p_y1 > 0.0 && p_y1 < 1.0)) throw ContractError("state: p_y1 must lie in (0, 1)");
  if (components.empty()) throw ContractError("state: at least one component required");
  if (z.size() != length) throw ContractError("state: z has wrong length");
  for (const auto& c : components) c.validate(v);
  for (const auto& mix : nu) {
    if (mix.size() != h()) throw ContractError("state: mixing vector has wrong length");
    if ((mix.array() < 0.0).any() || std::abs(mix.sum() - 1.0) > 1e-9) {
      throw ContractError("state: mixing vector must be a probability vector");
    }
  }
  if (t != 0 && t != 1) throw ContractError("state: t must be 0 or 1");
  if (t == 0 && nu[0] != nu[1]) throw ContractError("state: t = 0 requires equal mixing vectors");
  for (int gi : g) {
    if (gi < 0 || gi >= h()) throw ContractError("state: component assignment out of range");
  }
}

EdgeProbabilities component_edge_probs(const Eigen::VectorXd& z, const ComponentFactors& c) {
  const auto v = static_cast<int>(c.x.rows());
  const auto& index = *EdgeIndex::of(v);
  if (static_cast<std::size_t>(z.size()) != index.size() || c.x.cols() != c.lambda.size()) {
    throw ContractError("component_edge_probs: dimension mismatch");
  }
  const Eigen::MatrixXd scaled = c.x * c.lambda.asDiagonal();
  EdgeProbabilities pi(z.size());
  for (std::size_t l = 0; l < index.size(); ++l) {
    auto [row, col] = index.pair(l);
    const double d = scaled.row(row).dot(c.x.row(col));
    pi[l] = std::clamp(logistic(z[l] + d), kProbFloor, 1.0 - kProbFloor);
  }
  return pi;
}

Eigen::MatrixXd component_probability_matrix(const MixtureModelState& s) {
  Eigen::MatrixXd pi(s.z.size(), s.h());
  for (int h = 0; h < s.h(); ++h) pi.col(h) = component_edge_probs(s.z, s.components[h]);
  return pi;
}

MixtureLikelihood::MixtureLikelihood(const Eigen::MatrixXd& pi) {
  const Eigen::ArrayXXd p = pi.array().max(kProbFloor).min(1.0 - kProbFloor);
  log_p_ = p.log().matrix();
  log_q_ = (1.0 - p).log().matrix();
}

double MixtureLikelihood::component_log_likelihood(const EdgeVector& a, int h) const {
  if (static_cast<Eigen::Index>(a.size()) != log_p_.rows()) {
    throw ContractError("MixtureLikelihood: network length does not match the model");
  }
  double ll = 0.0;
  const auto bits = a.bits();
  for (std::size_t l = 0; l < bits.size(); ++l) ll += bits[l] ? log_p_(l, h) : log_q_(l, h);
  return ll;
}

double MixtureLikelihood::log_pmf(const EdgeVector& a, const Eigen::VectorXd& nu) const {
  std::vector<double> terms;
  terms.reserve(nu.size());
  for (int h = 0; h < components(); ++h) {
    if (nu[h] <= 0.0) continue;
    terms.push_back(std::log(nu[h]) + component_log_likelihood(a, h));
  }
  return log_sum_exp(terms);
}

double mixture_log_pmf(const EdgeVector& a, int y, const MixtureModelState& s) {
  return MixtureLikelihood(component_probability_matrix(s)).log_pmf(a, s.mixing(y));
}

double mixture_pmf(const EdgeVector& a, int y, const MixtureModelState& s) {
  return std::exp(mixture_log_pmf(a, y, s));
}

EdgeProbabilities group_edge_probs(const Eigen::MatrixXd& pi, const Eigen::VectorXd& nu_y) {
  if (pi.cols() != nu_y.size()) throw ContractError("group_edge_probs: dimension mismatch");
  return pi * nu_y;
}

EdgeProbabilities group_edge_probs(const MixtureModelState& s, int y) {
  return group_edge_probs(component_probability_matrix(s), s.mixing(y));
}

EdgeProbabilities marginal_edge_probs(const MixtureModelState& s) {
  const Eigen::MatrixXd pi = component_probability_matrix(s);
  return s.p_y1 * group_edge_probs(pi, s.nu[0]) + (1.0 - s.p_y1) * group_edge_probs(pi, s.nu[1]);
}

double cramers_v(double p_y1, double pibar1, double pibar2) {
  // 2 x 2 table: rho^2 = p(1) p(2) (pibar1 - pibar2)^2 / (m (1 - m)), m the edge marginal
  const double diff = pibar1 - pibar2;
  if (diff == 0.0) return 0.0;
  const double m = p_y1 * pibar1 + (1.0 - p_y1) * pibar2;
  const double spread = m * (1.0 - m);
  if (!(spread > 0.0)) {
    if (p_y1 > 0.0 && p_y1 < 1.0) throw ContractError("cramers_v: degenerate marginal with unequal conditionals");
    return 0.0;
  }
  const double rho2 = p_y1 * (1.0 - p_y1) * diff * diff / spread;
  return std::sqrt(std::clamp(rho2, 0.0, 1.0));
}

double cramers_v(const MixtureModelState& s, std::size_t l) {
  const Eigen::MatrixXd pi = component_probability_matrix(s);
  if (l >= static_cast<std::size_t>(pi.rows())) throw ContractError("cramers_v: edge index out of range");
  const double p1 = pi.row(l).dot(s.nu[0]);
  const double p2 = pi.row(l).dot(s.nu[1]);
  return cramers_v(s.p_y1, p1, p2);
}

Eigen::VectorXd cramers_v(double p_y1, const EdgeProbabilities& pibar1, const EdgeProbabilities& pibar2) {
  Eigen::VectorXd rho(pibar1.size());
  for (Eigen::Index l = 0; l < rho.size(); ++l) rho[l] = cramers_v(p_y1, pibar1[l], pibar2[l]);
  return rho;
}

SampledNetwork sample_network(const Eigen::MatrixXd& pi, const Eigen::VectorXd& nu_y, Rng& rng) {
  const int v = nodes_for_length(static_cast<std::size_t>(pi.rows()));
  if (v < 0 || pi.cols() != nu_y.size()) throw ContractError("sample_network: dimension mismatch");
  const int h = draw_categorical({nu_y.data(), static_cast<std::size_t>(nu_y.size())}, rng);
  std::vector<std::uint8_t> bits(pi.rows());
  for (Eigen::Index l = 0; l < pi.rows(); ++l) bits[l] = draw_uniform(rng) < pi(l, h) ? 1 : 0;
  return {EdgeVector(v, std::move(bits)), h};
}

SampledNetwork sample_network(const MixtureModelState& s, int y, Rng& rng) {
  return sample_network(component_probability_matrix(s), s.mixing(y), rng);
}

EdgeVector configuration(int v, std::size_t code) {
  std::vector<std::uint8_t> bits(pair_count(v));
  for (std::size_t l = 0; l < bits.size(); ++l) bits[l] = (code >> l) & 1u;
  return EdgeVector(v, std::move(bits));
}

std::vector<double> enumerate_pmf(const Eigen::MatrixXd& pi, const Eigen::VectorXd& nu_y) {
  const int v = nodes_for_length(static_cast<std::size_t>(pi.rows()));
  if (v < 0) throw ContractError("enumerate_pmf: probability vector length is not V(V-1)/2");
  if (v > 5) throw ContractError("enumerate_pmf: refusing v = " + std::to_string(v) + " (maximum 5)");
  const MixtureLikelihood lik(pi);
  const std::size_t configs = std::size_t{1} << pi.rows();
  std::vector<double> table(configs);
  for (std::size_t code = 0; code < configs; ++code) {
    table[code] = std::exp(lik.log_pmf(configuration(v, code), nu_y));
  }
  return table;
}

std::vector<double> enumerate_pmf(const MixtureModelState& s, int y) {
  if (s.v > 5) throw ContractError("enumerate_pmf: refusing v = " + std::to_string(s.v) + " (maximum 5)");
  return enumerate_pmf(component_probability_matrix(s), s.mixing(y));
}

}  // namespace netdiff
