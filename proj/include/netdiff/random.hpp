#pragma once

#include <cstdint>
#include <random>
#include <span>

#include <Eigen/Core>

namespace netdiff {

using Rng = std::mt19937_64;

/// Independent stream for (seed, stream) pairs, e.g. chain or replicate index.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

double draw_uniform(Rng& rng);  // (0, 1)
double draw_normal(Rng& rng);
double draw_exponential(Rng& rng);
double draw_gamma(double shape, double rate, Rng& rng);
/// log of a Gamma(shape, 1) draw; stable for very small shapes.
double draw_log_gamma(double shape, Rng& rng);
double draw_beta(double a, double b, Rng& rng);
Eigen::VectorXd draw_dirichlet(const Eigen::VectorXd& alpha, Rng& rng);
int draw_categorical(std::span<const double> probs, Rng& rng);
/// Categorical draw from unnormalised log weights.
int draw_categorical_log(std::span<const double> log_weights, Rng& rng);

double log_sum_exp(std::span<const double> x);

}  // namespace netdiff
