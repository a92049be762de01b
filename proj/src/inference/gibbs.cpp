#include "netdiff/gibbs.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include <Eigen/Cholesky>

#include "netdiff/errors.hpp"

namespace netdiff {

double log_multivariate_beta(std::span<const double> a) {
  double total = 0.0;
  double out = 0.0;
  for (double ah : a) {
    out += std::lgamma(ah);
    total += ah;
  }
  return out - std::lgamma(total);
}

double posterior_h1_probability(std::span<const int> counts1, std::span<const int> counts2, double alpha,
                                double prior_h1) {
  if (counts1.size() != counts2.size()) throw ContractError("posterior_h1_probability: count vectors differ in length");
  if (!(prior_h1 > 0.0 && prior_h1 < 1.0)) throw ContractError("posterior_h1_probability: prior must lie in (0, 1)");
  const std::size_t h = counts1.size();
  std::vector<double> base(h, alpha), a1(h), a2(h), pooled(h);
  for (std::size_t k = 0; k < h; ++k) {
    a1[k] = alpha + counts1[k];
    a2[k] = alpha + counts2[k];
    pooled[k] = alpha + counts1[k] + counts2[k];
  }
  const double lb0 = log_multivariate_beta(base);
  const double log_h1 = (log_multivariate_beta(a1) - lb0) + (log_multivariate_beta(a2) - lb0);
  const double log_h0 = log_multivariate_beta(pooled) - lb0;
  const double log_odds = std::log(prior_h1) - std::log1p(-prior_h1) + log_h1 - log_h0;
  return logistic(log_odds);
}

Eigen::VectorXd draw_mig(int rank, double a1, double a2, Rng& rng) {
  Eigen::VectorXd lambda(rank);
  double log_tau = 0.0;
  for (int m = 0; m < rank; ++m) {
    log_tau += std::log(draw_gamma(m == 0 ? a1 : a2, 1.0, rng));
    lambda[m] = std::exp(-log_tau);
  }
  return lambda;
}

double draw_augmented_logodds(double kappa_sum, double omega_sum, double prior_mean, double prior_var, Rng& rng) {
  const double precision = 1.0 / prior_var + omega_sum;
  const double mean = (prior_mean / prior_var + kappa_sum) / precision;
  return mean + draw_normal(rng) / std::sqrt(precision);
}

void Hyperparameters::validate() const {
  if (h_max < 1 || r_max < 1) throw ContractError("hyperparameters: H and R must be >= 1");
  for (double x : {beta_a, beta_b, z_var, mig_a1, mig_a2}) {
    if (!(x > 0.0)) throw ContractError("hyperparameters: Beta, variance and MIG parameters must be positive");
  }
  if (!(prior_h1 > 0.0 && prior_h1 < 1.0)) throw ContractError("hyperparameters: prior_h1 must lie in (0, 1)");
  if (!(concentration() > 0.0)) throw ContractError("hyperparameters: dirichlet_conc must be positive");
}

std::size_t GibbsConfig::stored() const {
  return n_iter > burn_in ? static_cast<std::size_t>((n_iter - burn_in) / thin) : 0;
}

void GibbsConfig::validate() const {
  if (n_iter < 1) throw ContractError("gibbs config: n_iter must be >= 1");
  if (burn_in < 0 || burn_in >= n_iter) throw ContractError("gibbs config: need 0 <= burn_in < n_iter");
  if (thin < 1) throw ContractError("gibbs config: thin must be >= 1");
  if (n_chains < 1) throw ContractError("gibbs config: n_chains must be >= 1");
  if (snapshot_thin < 1) throw ContractError("gibbs config: snapshot_thin must be >= 1");
}

GibbsSampler::GibbsSampler(const NetworkDataset& data, Hyperparameters hyper, PgMethod pg)
    : data_(data), hyper_(hyper), pg_(pg) {
  data_.validate();
  hyper_.validate();
  index_ = EdgeIndex::of(data_.v);
  const auto n = static_cast<Eigen::Index>(data_.size());
  const auto length = static_cast<Eigen::Index>(index_->size());
  edges_.resize(n, length);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto bits = data_.networks[i].bits();
    for (Eigen::Index l = 0; l < length; ++l) edges_(i, l) = bits[l];
  }
  n1_ = static_cast<int>(data_.group_count(1));
  n2_ = static_cast<int>(data_.group_count(2));
  w_.resize(hyper_.h_max);
  d_.resize(length, hyper_.h_max);
  pi_.resize(length, hyper_.h_max);
  successes_.resize(length, hyper_.h_max);
  omega_.resize(length, hyper_.h_max);
}

MixtureModelState GibbsSampler::initialize(Rng& rng) const {
  const int h = hyper_.h_max;
  const int r = hyper_.r_max;
  const auto n = static_cast<int>(data_.size());
  MixtureModelState s;
  s.v = data_.v;
  s.p_y1 = n > 0 ? std::clamp(double(n1_) / n, 0.5 / n, 1.0 - 0.5 / n) : 0.5;

  s.z.resize(edges_.cols());
  for (Eigen::Index l = 0; l < edges_.cols(); ++l) {
    const double freq = n > 0 ? edges_.col(l).mean() : 0.5;
    s.z[l] = logit(std::clamp(freq, 0.05, 0.95));
  }
  for (int k = 0; k < h; ++k) {
    ComponentFactors c;
    c.x.resize(s.v, r);
    for (Eigen::Index i = 0; i < c.x.size(); ++i) c.x.data()[i] = draw_normal(rng);
    c.lambda = draw_mig(r, hyper_.mig_a1, hyper_.mig_a2, rng);
    s.components.push_back(std::move(c));
  }
  s.g.resize(n);
  for (auto& gi : s.g) gi = static_cast<int>(rng() % static_cast<std::uint64_t>(h));

  const Eigen::VectorXd alpha = Eigen::VectorXd::Constant(h, hyper_.concentration());
  s.t = 1;
  s.nu[0] = draw_dirichlet(alpha, rng);
  s.nu[1] = draw_dirichlet(alpha, rng);
  s.upsilon = draw_dirichlet(alpha, rng);
  return s;
}

MixtureModelState GibbsSampler::draw_prior(Rng& rng) const {
  MixtureModelState s = initialize(rng);
  s.p_y1 = draw_beta(hyper_.beta_a, hyper_.beta_b, rng);
  const double sd = std::sqrt(hyper_.z_var);
  for (Eigen::Index l = 0; l < s.z.size(); ++l) s.z[l] = hyper_.z_mean + sd * draw_normal(rng);
  s.t = draw_uniform(rng) < hyper_.prior_h1 ? 1 : 0;
  if (s.t == 0) s.nu[0] = s.nu[1] = s.upsilon;
  for (std::size_t i = 0; i < s.g.size(); ++i) {
    const auto& mix = s.mixing(data_.groups[i]);
    s.g[i] = draw_categorical({mix.data(), static_cast<std::size_t>(mix.size())}, rng);
  }
  return s;
}

void GibbsSampler::refresh_probabilities(const MixtureModelState& s) {
  for (int h = 0; h < s.h(); ++h) {
    const auto& c = s.components[h];
    w_[h] = c.x * c.lambda.cwiseSqrt().asDiagonal();
    for (std::size_t l = 0; l < index_->size(); ++l) {
      auto [row, col] = index_->pair(l);
      d_(l, h) = w_[h].row(row).dot(w_[h].row(col));
      pi_(l, h) = std::clamp(logistic(s.z[l] + d_(l, h)), kProbFloor, 1.0 - kProbFloor);
    }
  }
}

void GibbsSampler::update_group_probability(MixtureModelState& s, Rng& rng) const {
  s.p_y1 = draw_beta(hyper_.beta_a + n1_, hyper_.beta_b + n2_, rng);
}

void GibbsSampler::update_assignments(MixtureModelState& s, Rng& rng) const {
  const int h = s.h();
  if (h == 1) {
    std::fill(s.g.begin(), s.g.end(), 0);
    return;
  }
  const Eigen::ArrayXXd log_p = pi_.array().log();
  const Eigen::ArrayXXd log_q = (1.0 - pi_.array()).log();
  const Eigen::MatrixXd log_odds = (log_p - log_q).matrix();
  const Eigen::RowVectorXd base = log_q.colwise().sum().matrix();
  const Eigen::MatrixXd loglik = (edges_ * log_odds).rowwise() + base;  // n x H

  std::vector<double> weights(h);
  for (std::size_t i = 0; i < s.g.size(); ++i) {
    const auto& mix = s.mixing(data_.groups[i]);
    for (int k = 0; k < h; ++k) {
      weights[k] = std::log(std::max(mix[k], std::numeric_limits<double>::min())) + loglik(i, k);
    }
    s.g[i] = draw_categorical_log(weights, rng);
  }
}

void GibbsSampler::update_factors(MixtureModelState& s, Rng& rng) {
  const int h_max = s.h();
  const int v = s.v;
  const auto length = static_cast<Eigen::Index>(index_->size());

  occupancy_.assign(h_max, 0);
  successes_.setZero();
  for (std::size_t i = 0; i < s.g.size(); ++i) {
    ++occupancy_[s.g[i]];
    successes_.col(s.g[i]) += edges_.row(i).transpose();
  }

  // Polya-gamma augmentation, one PG(1, psi) per observation-edge, summed per component
  omega_.setZero();
  for (int h = 0; h < h_max; ++h) {
    if (occupancy_[h] == 0) continue;
    for (Eigen::Index l = 0; l < length; ++l) {
      const double psi = s.z[l] + d_(l, h);
      omega_(l, h) = draw_polya_gamma_sum(occupancy_[h], psi, rng, pg_);
    }
  }

  // shared log-odds
  for (Eigen::Index l = 0; l < length; ++l) {
    double kappa = 0.0;
    double omega = 0.0;
    for (int h = 0; h < h_max; ++h) {
      if (occupancy_[h] == 0) continue;
      kappa += successes_(l, h) - 0.5 * occupancy_[h] - omega_(l, h) * d_(l, h);
      omega += omega_(l, h);
    }
    s.z[l] = draw_augmented_logodds(kappa, omega, hyper_.z_mean, hyper_.z_var, rng);
  }

  // latent coordinates (scaled by sqrt(lambda)) row by row, then MIG weights
  for (int h = 0; h < h_max; ++h) {
    auto& comp = s.components[h];
    const int r = comp.rank();
    Eigen::MatrixXd& w = w_[h];
    const Eigen::VectorXd prior_precision = comp.lambda.cwiseInverse();

    if (occupancy_[h] == 0) {
      for (int node = 0; node < v; ++node) {
        for (int k = 0; k < r; ++k) w(node, k) = draw_normal(rng) * std::sqrt(comp.lambda[k]);
      }
    } else {
      Eigen::MatrixXd precision(r, r);
      Eigen::VectorXd linear(r);
      Eigen::VectorXd noise(r);
      const double half_n = 0.5 * occupancy_[h];
      for (int node = 0; node < v; ++node) {
        precision = prior_precision.asDiagonal();
        linear.setZero();
        for (const auto& inc : index_->incident(node)) {
          const double om = omega_(inc.edge, h);
          const auto wu = w.row(inc.other).transpose();
          precision.selfadjointView<Eigen::Lower>().rankUpdate(wu, om);
          linear += (successes_(inc.edge, h) - half_n - om * s.z[inc.edge]) * wu;
        }
        Eigen::LLT<Eigen::MatrixXd> chol(precision.selfadjointView<Eigen::Lower>());
        if (chol.info() != Eigen::Success) {
          throw NumericalError("latent coordinate precision is not positive definite");
        }
        for (int k = 0; k < r; ++k) noise[k] = draw_normal(rng);
        const Eigen::VectorXd mean = chol.solve(linear);
        w.row(node) = (mean + chol.matrixU().solve(noise)).transpose();
      }
    }

    // theta_m ~ Gamma(a_m + v (r - m + 1) / 2, 1 + 1/2 sum_{q >= m} tau_q^(-m) sum_v w_vq^2)
    Eigen::VectorXd theta(r);
    theta[0] = 1.0 / comp.lambda[0];
    for (int m = 1; m < r; ++m) theta[m] = comp.lambda[m - 1] / comp.lambda[m];
    const Eigen::VectorXd col_sq = w.colwise().squaredNorm().transpose();
    for (int m = 0; m < r; ++m) {
      double rate = 1.0;
      double tau = 1.0;
      for (int q = 0; q < r; ++q) {
        if (q != m) tau *= theta[q];
        if (q >= m) rate += 0.5 * tau * col_sq[q];
      }
      const double shape = (m == 0 ? hyper_.mig_a1 : hyper_.mig_a2) + 0.5 * v * (r - m);
      theta[m] = draw_gamma(shape, rate, rng);
    }
    double tau = 1.0;
    for (int m = 0; m < r; ++m) {
      tau *= theta[m];
      comp.lambda[m] = 1.0 / tau;
    }
    comp.x = w * comp.lambda.cwiseSqrt().cwiseInverse().asDiagonal();
  }
  refresh_probabilities(s);
}

void GibbsSampler::update_indicator(MixtureModelState& s, Rng& rng) const {
  std::vector<int> c1(s.h(), 0), c2(s.h(), 0);
  for (std::size_t i = 0; i < s.g.size(); ++i) ++(data_.groups[i] == 1 ? c1 : c2)[s.g[i]];
  const double pr = posterior_h1_probability(c1, c2, hyper_.concentration(), hyper_.prior_h1);
  s.t = draw_uniform(rng) < pr ? 1 : 0;
}

void GibbsSampler::update_mixing(MixtureModelState& s, Rng& rng) const {
  const int h = s.h();
  Eigen::VectorXd a1 = Eigen::VectorXd::Constant(h, hyper_.concentration());
  Eigen::VectorXd a2 = a1;
  for (std::size_t i = 0; i < s.g.size(); ++i) (data_.groups[i] == 1 ? a1 : a2)[s.g[i]] += 1.0;
  if (s.t == 0) {
    const Eigen::VectorXd pooled = a1 + a2 - Eigen::VectorXd::Constant(h, hyper_.concentration());
    s.upsilon = draw_dirichlet(pooled, rng);
    s.nu[0] = s.nu[1] = s.upsilon;
  } else {
    s.nu[0] = draw_dirichlet(a1, rng);
    s.nu[1] = draw_dirichlet(a2, rng);
    s.upsilon = draw_dirichlet(Eigen::VectorXd::Constant(h, hyper_.concentration()), rng);
  }
}

void GibbsSampler::step(MixtureModelState& s, Rng& rng) {
  if (s.h() != hyper_.h_max || s.g.size() != data_.size() || s.v != data_.v) {
    throw ContractError("GibbsSampler::step: state does not match dataset/hyperparameters");
  }
  refresh_probabilities(s);
  update_group_probability(s, rng);
  update_assignments(s, rng);
  update_factors(s, rng);
  update_indicator(s, rng);
  update_mixing(s, rng);
}

MixtureModelState gibbs_step(MixtureModelState state, const NetworkDataset& data, const Hyperparameters& hyper,
                             Rng& rng) {
  GibbsSampler sampler(data, hyper);
  sampler.step(state, rng);
  return state;
}

namespace {

bool finite_state(const MixtureModelState& s, const Eigen::MatrixXd& pi) {
  if (!std::isfinite(s.p_y1) || !s.z.allFinite() || !pi.allFinite()) return false;
  for (const auto& c : s.components) {
    if (!c.x.allFinite() || !c.lambda.allFinite()) return false;
  }
  return s.nu[0].allFinite() && s.nu[1].allFinite();
}

}  // namespace

PosteriorChain run_chain(const NetworkDataset& data, const Hyperparameters& hyper, const GibbsConfig& config,
                         Rng& rng, int chain_index) {
  config.validate();
  GibbsSampler sampler(data, hyper, config.pg_method);
  MixtureModelState state = sampler.initialize(rng);

  const auto stored = static_cast<Eigen::Index>(config.stored());
  const auto length = static_cast<Eigen::Index>(pair_count(data.v));
  const int h = hyper.h_max;
  PosteriorChain chain;
  chain.v = data.v;
  chain.h = h;
  chain.chain_index = chain_index;
  chain.hyper = hyper;
  chain.config = config;
  chain.t.reserve(stored);
  chain.p_y1.reserve(stored);
  chain.nu1.resize(stored, h);
  chain.nu2.resize(stored, h);
  chain.occupancy.resize(stored, h);
  chain.pibar1.resize(stored, length);
  chain.pibar2.resize(stored, length);
  chain.rho.resize(stored, length);
  if (config.predictive) {
    for (auto& p : chain.predictive) p.resize(stored, static_cast<Eigen::Index>(kPredictiveColumns.size()));
  }
  const std::span<const int> blocks = data.blocks ? std::span<const int>(*data.blocks) : std::span<const int>{};

  Eigen::Index k = 0;
  for (int iter = 1; iter <= config.n_iter; ++iter) {
    sampler.step(state, rng);
    const auto& pi = sampler.component_probs();
    if (!finite_state(state, pi)) {
      throw NumericalError("non-finite sampler state at iteration " + std::to_string(iter) + " of chain " +
                           std::to_string(chain_index));
    }
    if (iter <= config.burn_in || (iter - config.burn_in) % config.thin != 0) continue;

    const Eigen::VectorXd pibar1 = pi * state.nu[0];
    const Eigen::VectorXd pibar2 = pi * state.nu[1];
    chain.t.push_back(state.t);
    chain.p_y1.push_back(state.p_y1);
    chain.nu1.row(k) = state.nu[0].transpose();
    chain.nu2.row(k) = state.nu[1].transpose();
    chain.pibar1.row(k) = pibar1.transpose();
    chain.pibar2.row(k) = pibar2.transpose();
    chain.rho.row(k) = cramers_v(state.p_y1, pibar1, pibar2).transpose();
    chain.occupancy.row(k).setZero();
    for (int gi : state.g) chain.occupancy(k, gi) += 1.0;
    if (k % config.snapshot_thin == 0) {
      chain.snapshots.push_back({state.p_y1, state.nu[0], state.nu[1], pi});
    }
    if (config.predictive) {
      for (int y = 1; y <= 2; ++y) {
        const auto net = sample_network(pi, state.mixing(y), rng);
        const auto stats = summary_stats(net.edges, blocks);
        auto row = chain.predictive[y - 1].row(k);
        row[0] = stats.density;
        row[1] = stats.transitivity;
        row[2] = stats.avg_path_length;
        row[3] = stats.assortativity.value_or(std::nan(""));
        row[4] = blocks.empty() ? std::nan("") : static_cast<double>(between_block_edges(net.edges, blocks));
      }
    }
    ++k;
  }
  return chain;
}

std::vector<PosteriorChain> run_chains(const NetworkDataset& data, const Hyperparameters& hyper,
                                       const GibbsConfig& config, int threads) {
  config.validate();
  std::vector<PosteriorChain> chains(config.n_chains);
  std::vector<std::exception_ptr> errors(config.n_chains);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < config.n_chains; k = next++) {
      try {
        Rng rng = make_rng(config.seed, static_cast<std::uint64_t>(k));
        chains[k] = run_chain(data, hyper, config, rng, k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int workers = std::clamp(threads, 1, config.n_chains);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return chains;
}

}  // namespace netdiff
