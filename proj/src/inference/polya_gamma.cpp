#include "netdiff/polya_gamma.hpp"

#include <cmath>
#include <numbers>

namespace netdiff {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTrunc = 0.64;  // switch point between the two series representations

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Probability of proposing from the truncated exponential piece.
double exponential_mass(double z, double fz) {
  const double b = std::sqrt(1.0 / kTrunc) * (kTrunc * z - 1.0);
  const double a = -std::sqrt(1.0 / kTrunc) * (kTrunc * z + 1.0);
  const double x0 = std::log(fz) + fz * kTrunc;
  const double xb = x0 - z + std::log(normal_cdf(b));
  const double xa = x0 + z + std::log(normal_cdf(a));
  const double q_over_p = 4.0 / kPi * (std::exp(xb) + std::exp(xa));
  return 1.0 / (1.0 + q_over_p);
}

// Inverse Gaussian IG(1/z, 1) truncated to (0, kTrunc).
double truncated_inverse_gaussian(double z, Rng& rng) {
  const double mu = 1.0 / z;
  double x = kTrunc + 1.0;
  if (mu > kTrunc) {
    double alpha = 0.0;
    while (draw_uniform(rng) > alpha) {
      double e1 = draw_exponential(rng);
      double e2 = draw_exponential(rng);
      while (e1 * e1 > 2.0 * e2 / kTrunc) {
        e1 = draw_exponential(rng);
        e2 = draw_exponential(rng);
      }
      x = kTrunc / ((1.0 + kTrunc * e1) * (1.0 + kTrunc * e1));
      alpha = std::exp(-0.5 * z * z * x);
    }
  } else {
    while (x > kTrunc) {
      const double n = draw_normal(rng);
      const double y = n * n;
      x = mu + 0.5 * mu * mu * y - 0.5 * mu * std::sqrt(4.0 * mu * y + (mu * y) * (mu * y));
      if (draw_uniform(rng) > mu / (mu + x)) x = mu * mu / x;
    }
  }
  return x;
}

}  // namespace

namespace {

// Quantities of the accept/reject scheme that depend only on the tilt.
struct TiltedProposal {
  double z;
  double fz;
  double p_exp;

  explicit TiltedProposal(double tilt) : z(std::abs(tilt) * 0.5), fz(0.125 * kPi * kPi + 0.5 * z * z) {
    p_exp = exponential_mass(z, fz);
  }

  double draw(Rng& rng) const {
    for (;;) {
      const double x =
          draw_uniform(rng) < p_exp ? kTrunc + draw_exponential(rng) / fz : truncated_inverse_gaussian(z, rng);
      const double log_x = std::log(x);
      auto coef = [x, log_x](int n) {
        const double k = (n + 0.5) * kPi;
        if (x > kTrunc) return k * std::exp(-0.5 * k * k * x);
        return std::exp(-1.5 * (std::log(0.5 * kPi) + log_x) + std::log(k) - 2.0 * (n + 0.5) * (n + 0.5) / x);
      };
      double s = coef(0);
      const double y = draw_uniform(rng) * s;
      for (int n = 1;; ++n) {
        if (n % 2 == 1) {
          s -= coef(n);
          if (y <= s) return 0.25 * x;
        } else {
          s += coef(n);
          if (y > s) break;
        }
      }
    }
  }
};

}  // namespace

double draw_polya_gamma(double z, Rng& rng) { return TiltedProposal(z).draw(rng); }

double draw_polya_gamma_sum(int count, double z, Rng& rng, PgMethod method) {
  double sum = 0.0;
  if (method == PgMethod::exact) {
    const TiltedProposal proposal(z);
    for (int k = 0; k < count; ++k) sum += proposal.draw(rng);
  } else {
    for (int k = 0; k < count; ++k) sum += draw_polya_gamma_truncated(z, rng);
  }
  return sum;
}

double draw_polya_gamma_truncated(double z, Rng& rng, int terms) {
  const double shift = z * z / (4.0 * kPi * kPi);
  double sum = 0.0;
  for (int k = 1; k <= terms; ++k) {
    const double c = (k - 0.5) * (k - 0.5) + shift;
    sum += draw_exponential(rng) / c;
  }
  return sum / (2.0 * kPi * kPi);
}

double draw_polya_gamma(double z, Rng& rng, PgMethod method) {
  return method == PgMethod::exact ? draw_polya_gamma(z, rng) : draw_polya_gamma_truncated(z, rng);
}

double polya_gamma_mean(double z) {
  if (std::abs(z) < 1e-6) return 0.25 - z * z / 48.0;
  return std::tanh(0.5 * z) / (2.0 * z);
}

double polya_gamma_variance(double z) {
  z = std::abs(z);
  if (z < 1e-3) return 1.0 / 24.0 - z * z / 120.0;
  const double c = std::cosh(0.5 * z);
  return (std::sinh(z) - z) / (4.0 * z * z * z * c * c);
}

}  // namespace netdiff
