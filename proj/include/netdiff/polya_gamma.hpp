#pragma once

#include "netdiff/random.hpp"

namespace netdiff {

enum class PgMethod {
  exact,          // alternating-series accept/reject
  truncated_sum,  // first 160 terms of the infinite convolution of gammas
};

/// Exact draw from PG(1, z) (Devroye-type accept/reject on J*(1, z/2)).
double draw_polya_gamma(double z, Rng& rng);

/// Approximate PG(1, z) from the first `terms` terms of
/// (1 / 2 pi^2) sum_k E_k / ((k - 1/2)^2 + z^2 / (4 pi^2)).
double draw_polya_gamma_truncated(double z, Rng& rng, int terms = 160);

double draw_polya_gamma(double z, Rng& rng, PgMethod method);

/// Sum of `count` independent PG(1, z) draws, i.e. one PG(count, z) draw.
double draw_polya_gamma_sum(int count, double z, Rng& rng, PgMethod method = PgMethod::exact);

/// E[PG(1, z)] = tanh(z / 2) / (2 z), with the z -> 0 limit 1/4.
double polya_gamma_mean(double z);
/// Var[PG(1, z)] = (sinh z - z) / (4 z^3 cosh^2(z / 2)), limit 1/24.
double polya_gamma_variance(double z);

}  // namespace netdiff
