#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "netdiff/chain.hpp"

namespace netdiff {

/// Gelman-Rubin potential scale reduction over equal-length sub-chains
/// (longer ones are truncated to the shortest). Returns 1 when every draw is equal.
double psrf(const std::vector<std::vector<double>>& subchains);

/// Consecutive, equal-length pieces of `draws`; a remainder at the end is dropped.
std::vector<std::vector<double>> split_chain(std::span<const double> draws, int parts = 4);

/// Effective sample size from Geyer's initial positive sequence of
/// autocorrelation pairs. A constant sequence has ESS equal to its length.
double ess(std::span<const double> draws);

struct MonitoredFunctional {
  std::string name;
  double psrf;
  double ess;  // summed over chains
};

struct DiagnosticsReport {
  std::vector<MonitoredFunctional> functionals;
  std::size_t stored = 0;  // draws over all chains
  int subchains = 4;

  double max_psrf() const;
  double median_ess() const;
  std::size_t psrf_above(double cutoff) const;
};

/// PSRF (each chain split into `parts` pieces) and ESS for every rho_l and pibar_yl.
DiagnosticsReport diagnose(std::span<const PosteriorChain> chains, int parts = 4);

nlohmann::json to_json(const DiagnosticsReport& report);

}  // namespace netdiff
