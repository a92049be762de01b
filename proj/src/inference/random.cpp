#include "netdiff/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "netdiff/errors.hpp"

namespace netdiff {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x6e657464u};
  return Rng(seq);
}

double draw_uniform(Rng& rng) {
  boost::random::uniform_01<double> u;
  double x;
  do {
    x = u(rng);
  } while (x <= 0.0);
  return x;
}

double draw_normal(Rng& rng) {
  boost::random::normal_distribution<double> n;
  return n(rng);
}

double draw_exponential(Rng& rng) {
  boost::random::exponential_distribution<double> e;
  return e(rng);
}

double draw_gamma(double shape, double rate, Rng& rng) {
  if (!(shape > 0.0) || !(rate > 0.0)) throw ContractError("draw_gamma: shape and rate must be positive");
  boost::random::gamma_distribution<double> g(shape, 1.0 / rate);
  return g(rng);
}

double draw_log_gamma(double shape, Rng& rng) {
  if (!(shape > 0.0)) throw ContractError("draw_log_gamma: shape must be positive");
  if (shape >= 1.0) return std::log(draw_gamma(shape, 1.0, rng));
  // Gamma(a) = Gamma(a + 1) * U^(1/a)
  return std::log(draw_gamma(shape + 1.0, 1.0, rng)) + std::log(draw_uniform(rng)) / shape;
}

double draw_beta(double a, double b, Rng& rng) {
  const double la = draw_log_gamma(a, rng);
  const double lb = draw_log_gamma(b, rng);
  const double m = std::max(la, lb);
  const double x = std::exp(la - m) / (std::exp(la - m) + std::exp(lb - m));
  constexpr double tiny = std::numeric_limits<double>::min();
  return std::clamp(x, tiny, 1.0 - std::numeric_limits<double>::epsilon() / 2);
}

Eigen::VectorXd draw_dirichlet(const Eigen::VectorXd& alpha, Rng& rng) {
  Eigen::VectorXd logs(alpha.size());
  for (Eigen::Index h = 0; h < alpha.size(); ++h) logs[h] = draw_log_gamma(alpha[h], rng);
  const double norm = log_sum_exp({logs.data(), static_cast<std::size_t>(logs.size())});
  Eigen::VectorXd out(alpha.size());
  for (Eigen::Index h = 0; h < alpha.size(); ++h) {
    out[h] = std::max(std::exp(logs[h] - norm), std::numeric_limits<double>::min());
  }
  return out / out.sum();
}

int draw_categorical(std::span<const double> probs, Rng& rng) {
  double total = 0.0;
  for (double p : probs) total += p;
  double u = draw_uniform(rng) * total;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    u -= probs[k];
    if (u <= 0.0) return static_cast<int>(k);
  }
  // round-off: last index with positive mass
  for (std::size_t k = probs.size(); k-- > 0;) {
    if (probs[k] > 0.0) return static_cast<int>(k);
  }
  return static_cast<int>(probs.size()) - 1;
}

int draw_categorical_log(std::span<const double> log_weights, Rng& rng) {
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  std::vector<double> w(log_weights.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::exp(log_weights[k] - top);
  return draw_categorical(w, rng);
}

double log_sum_exp(std::span<const double> x) {
  if (x.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(top)) return top;
  double s = 0.0;
  for (double v : x) s += std::exp(v - top);
  return top + std::log(s);
}

}  // namespace netdiff
