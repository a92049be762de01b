// Acceptance suite: one PASS/FAIL line per criterion. Seeds are fixed up front.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "netdiff/baselines.hpp"
#include "netdiff/dataset_io.hpp"
#include "netdiff/diagnostics.hpp"
#include "netdiff/gibbs.hpp"
#include "netdiff/polya_gamma.hpp"
#include "netdiff/scenario.hpp"
#include "netdiff/study.hpp"
#include "netdiff/testing.hpp"
#include "oracles.hpp"

using namespace netdiff;

namespace {

constexpr std::uint64_t kDatasetSeed = 2024;
constexpr std::uint64_t kChainSeed = 1;
constexpr std::uint64_t kStudySeed = 1;
constexpr int kReplicates = 25;
constexpr int kScenario2Replicates = 10;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    detail << (ok ? "" : "[miss] ") << what << "; ";
  }
};

std::string fmt(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

void progress(const std::string& msg) { std::cerr << "[acceptance] " << msg << std::endl; }

StudySettings study_settings(int replicates) {
  StudySettings s;
  s.replicates = replicates;
  s.seed = kStudySeed;
  return s;
}

// Shared state between criteria that reuse the same fits.
struct Shared {
  std::vector<PosteriorChain> default_fits;  // dependent, independent
  std::vector<StudyResult> table1;
};

Shared shared;

// 1. Global test on one dependent and one independent scenario-1 dataset.
void criterion1(Outcome& o) {
  Hyperparameters hyper;
  GibbsConfig config;
  config.seed = kChainSeed;
  for (bool dependent : {true, false}) {
    const auto sim = make_scenario1(dependent, kDatasetSeed);
    Rng rng = make_rng(config.seed);
    const auto start = std::chrono::steady_clock::now();
    auto chain = run_chain(sim.data, hyper, config, rng);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double pr = global_test(chain).pr_h1;
    if (dependent) {
      o.require(pr > 0.99, "dependent pr_h1 = " + fmt(pr) + " > 0.99 (" + fmt(secs, 3) + " s)");
    } else {
      o.require(pr < 0.01, "independent pr_h1 = " + fmt(pr) + " < 0.01 (" + fmt(secs, 3) + " s)");
    }
    shared.default_fits.push_back(std::move(chain));
  }
}

// 2. Error-rate panel over 25 replicates per scenario.
void criterion2(Outcome& o) {
  shared.table1 = run_preset("table1-desk", study_settings(kReplicates));
  const auto& panels = shared.table1[0].panels;
  const auto& mix = panels[0];
  const auto& manova = panels[2];
  o.require(mix.failures == 0, "failed fits = " + std::to_string(mix.failures));
  o.require(*mix.global_type1 <= 0.08, "mixture global type I = " + fmt(*mix.global_type1) + " <= 0.08");
  o.require(*mix.global_type2 <= 0.08, "mixture global type II = " + fmt(*mix.global_type2) + " <= 0.08");
  o.require(*mix.fwer <= 0.15, "local FWER = " + fmt(*mix.fwer) + " <= 0.15");
  o.require(*mix.fdr <= 0.05, "local FDR = " + fmt(*mix.fdr) + " <= 0.05");
  o.require(*manova.global_type2 >= 0.8, "MANOVA type II = " + fmt(*manova.global_type2) + " >= 0.8");
  o.detail << "info: local type I = " << fmt(*mix.local_type1) << ", local type II = " << fmt(*mix.local_type2)
           << ", Fisher local type I/II = " << fmt(*panels[1].local_type1) << "/" << fmt(*panels[1].local_type2)
           << "; ";
}

// 3. Local AUC on the dependence replicates.
void criterion3(Outcome& o) {
  if (shared.table1.empty()) shared.table1 = run_preset("table1-desk", study_settings(kReplicates));
  std::vector<double> mix, fisher;
  for (const auto& r : shared.table1[0].records) {
    if (!r.h1_true || r.failed) continue;
    mix.push_back(r.auc);
    fisher.push_back(r.fisher_auc);
  }
  const auto good = std::count_if(mix.begin(), mix.end(), [](double a) { return a >= 0.95; });
  const double share = static_cast<double>(good) / static_cast<double>(mix.size());
  const auto mean = [](const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
  };
  o.require(share >= 0.9, "replicates with mixture AUC >= 0.95: " + fmt(share) + " >= 0.9");
  o.require(mean(fisher) < mean(mix),
            "mean Fisher AUC " + fmt(mean(fisher)) + " < mean mixture AUC " + fmt(mean(mix)));
  o.detail << "info: mixture AUC min " << fmt(*std::min_element(mix.begin(), mix.end())) << "; ";
}

// 4. Scenario-2 signature and posterior-predictive bimodality.
void criterion4(Outcome& o) {
  const auto result = run_preset("scenario2", study_settings(kScenario2Replicates))[0];
  int signature = 0, bimodal = 0;
  std::ostringstream per;
  for (const auto& r : result.records) {
    signature += !r.failed && r.pr_h1 > 0.9 && r.local_rejections == 0;
    bimodal += !r.failed && r.between_separation2 > 0.8 && r.between_separation1 < 0.8;
    per << fmt(r.pr_h1, 3) << "/" << r.local_rejections << "/" << fmt(r.between_separation1, 2) << "/"
        << fmt(r.between_separation2, 2) << " ";
  }
  const double n = static_cast<double>(result.records.size());
  o.require(signature / n >= 0.8, "global reject with zero local rejections: " + fmt(signature / n) + " >= 0.8");
  o.require(bimodal / n >= 0.8,
            "group 2 bimodal and group 1 unimodal (separation 0.8): " + fmt(bimodal / n) + " >= 0.8");
  o.detail << "info pr/local/sep1/sep2: " << per.str() << "; ";
}

// 5. Sample-size behaviour at n = 20 and n = 100.
void criterion5(Outcome& o) {
  auto settings = study_settings(kReplicates);
  settings.methods = {StudyMethod::mixture};
  for (int n : {20, 100}) {
    progress("criterion 5: n = " + std::to_string(n));
    const auto result =
        run_study({scenario1_spec(true, 0, n), scenario1_spec(false, 0, n)}, settings, "n=" + std::to_string(n));
    std::vector<double> h1, h0;
    for (const auto& r : result.records) {
      if (r.failed) continue;
      (r.h1_true ? h1 : h0).push_back(r.pr_h1);
    }
    if (n == 20) {
      const auto below = std::count_if(h1.begin(), h1.end(), [](double p) { return p < 0.9; });
      const auto type1 = std::count_if(h0.begin(), h0.end(), [](double p) { return p > 0.9; });
      o.require(below >= 1, "n=20 H1 replicates below 0.9: " + std::to_string(below));
      o.require(type1 <= 2, "n=20 type I errors: " + std::to_string(type1) + " <= 2 of " + std::to_string(h0.size()));
    } else {
      double m1 = 0.0, m0 = 0.0;
      for (double p : h1) m1 += p;
      for (double p : h0) m0 += p;
      m1 /= static_cast<double>(h1.size());
      m0 /= static_cast<double>(h0.size());
      o.require(m0 < 0.1, "n=100 mean H0 pr = " + fmt(m0) + " < 0.1");
      o.require(m1 > 0.9, "n=100 mean H1 pr = " + fmt(m1) + " > 0.9");
    }
  }
}

// 6. Exact enumeration oracles and the high-precision indicator conditional.
void criterion6(Outcome& o) {
  const auto err = oracle::enumeration_errors(300, 6);
  o.require(err.pmf_total < 1e-12, "pmf total error " + fmt(err.pmf_total, 3));
  o.require(err.marginal < 1e-12, "marginal error " + fmt(err.marginal, 3));
  o.require(err.cramers_v < 1e-12, "Cramer's V error " + fmt(err.cramers_v, 3));
  const double rel = oracle::indicator_relative_error(2000, 6);
  o.require(rel < 1e-8, "indicator conditional relative error " + fmt(rel, 3));
}

// 7. Sampler kernels: PG means, logistic grid posterior, Geweke joint test.
void criterion7(Outcome& o) {
  const int draws = 1000000;
  for (double z : {0.0, 0.5, 2.0, 5.0}) {
    Rng rng = make_rng(7, static_cast<std::uint64_t>(z * 10));
    double sum = 0.0;
    for (int k = 0; k < draws; ++k) sum += draw_polya_gamma(z, rng);
    const double mean = sum / draws;
    const double expected = z == 0.0 ? 0.25 : std::tanh(z / 2) / (2 * z);
    const double se = std::sqrt(polya_gamma_variance(z) / draws);
    o.require(std::abs(mean - expected) < 3 * se,
              "PG z=" + fmt(z) + ": " + fmt((mean - expected) / se, 3) + " SE from tanh(z/2)/(2z)");
  }
  const double ks = oracle::logistic_grid_ks(200000, 7);
  o.require(ks < 0.02, "grid posterior KS " + fmt(ks, 3) + " < 0.02");
  const std::set<std::string> required{"p_y1", "p_y1^2", "nu1_1", "nu1_1^2"};
  for (const auto& m : oracle::geweke(200000, 7)) {
    const double z = (m.estimate.mean - m.expected) / m.estimate.se;
    if (required.count(m.name)) {
      o.require(m.within(4.0), "Geweke " + m.name + " " + fmt(z, 3) + " SE");
    } else {
      o.detail << "info Geweke " << m.name << " " << fmt(z, 3) << " SE; ";
    }
  }
}

// 8. Convergence diagnostics on the default fits.
void criterion8(Outcome& o) {
  if (shared.default_fits.empty()) {
    Outcome scratch;
    criterion1(scratch);
  }
  const char* names[] = {"dependent", "independent"};
  for (std::size_t k = 0; k < shared.default_fits.size(); ++k) {
    const auto& chain = shared.default_fits[k];
    const auto report = diagnose(std::span<const PosteriorChain>(&chain, 1));
    const double stored = static_cast<double>(chain.size());
    o.require(report.max_psrf() < 1.1, std::string(names[k]) + " max PSRF " + fmt(report.max_psrf()) + " < 1.1");
    o.require(report.median_ess() > 0.25 * stored, std::string(names[k]) + " median ESS " +
                                                       fmt(report.median_ess()) + " > 25% of " + fmt(stored));
  }
  if (!shared.table1.empty()) {
    const auto& records = shared.table1[0].records;
    const auto ok = std::count_if(records.begin(), records.end(), [](const auto& r) { return r.max_psrf < 1.1; });
    o.detail << "info: study replicates with max PSRF < 1.1: " << ok << "/" << records.size() << "; ";
  }
}

// 9. Baseline correctness against exact oracles.
void criterion9(Outcome& o) {
  double worst = 0.0;
  std::size_t tables = 0;
  for (int r1 = 0; r1 <= 30; ++r1)
    for (int r2 = 0; r2 <= 30; ++r2)
      for (int a = 0; a <= r1; ++a)
        for (int c = 0; c <= r2; ++c) {
          const double expected = oracle::fisher(a, r1 - a, c, r2 - c);
          const double got = fisher_exact_two_sided({a, r1 - a, c, r2 - c});
          worst = std::max(worst, std::abs(got - expected) / expected);
          ++tables;
        }
  o.require(worst < 1e-12, "Fisher vs enumeration over " + std::to_string(tables) + " tables, max rel error " +
                               fmt(worst, 3));
  const double cal = calibrate_p(1.0 / std::numbers::e);
  o.require(std::abs(cal - 0.5) < 1e-15, "calibrate_p(1/e) = " + fmt(cal, 17));
  Rng rng = make_rng(9);
  int mismatches = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> p(1 + rng() % 60);
    for (auto& x : p) x = trial % 2 ? std::pow(draw_uniform(rng), 4.0) : std::round(draw_uniform(rng) * 40) / 40;
    const double q = 0.01 + 0.3 * draw_uniform(rng);
    mismatches += benjamini_hochberg(p, q) != oracle::benjamini_hochberg(p, q);
  }
  o.require(mismatches == 0, "BH step-up mismatches over 2000 random inputs: " + std::to_string(mismatches));
}

// 10. Ingestion smoke test on the bundled V = 68 dataset.
void criterion10(Outcome& o) {
  const std::filesystem::path dir = NETDIFF_TEST_DATA "/synthetic_v68";
  const auto data = load_dataset(dir / "networks.csv", dir / "groups.csv", NetworkFormat::csv, dir / "blocks.csv");
  o.require(data.v == 68 && data.size() == 36, "loaded n=" + std::to_string(data.size()) + " v=" +
                                                   std::to_string(data.v));
  Hyperparameters hyper;
  hyper.h_max = 15;
  GibbsConfig config;
  config.n_iter = 500;
  config.burn_in = 100;
  config.seed = kChainSeed;
  Rng rng = make_rng(config.seed);
  const auto start = std::chrono::steady_clock::now();
  const auto chain = run_chain(data, hyper, config, rng);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto global = global_test(chain);
  const auto local = local_tests(chain);
  const bool finite = std::isfinite(global.pr_h1) && local.pr.allFinite() && chain.rho.allFinite() &&
                      chain.pibar1.allFinite() && chain.pibar2.allFinite();
  o.require(finite && chain.size() == 400, "500-iteration fit with H=15 finished with finite output (" +
                                               fmt(secs, 3) + " s, pr_h1 " + fmt(global.pr_h1) + ")");
  const auto m = manova_summary_test(data);
  const auto f = fisher_edge_tests(data);
  o.require(std::isfinite(m.p_value) && f.p.size() == 2278, "baselines ran (MANOVA p " + fmt(m.p_value) + ")");
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int k = 1; k < argc; ++k) only.insert(std::atoi(argv[k]));
  const std::vector<std::pair<int, std::function<void(Outcome&)>>> criteria{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}};
  int failures = 0;
  for (const auto& [id, run] : criteria) {
    if (!only.empty() && !only.count(id)) continue;
    progress("criterion " + std::to_string(id));
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << o.detail.str() << "(" << fmt(secs, 3)
              << " s)" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
