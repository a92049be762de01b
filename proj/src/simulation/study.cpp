#include "netdiff/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <thread>

#include "netdiff/baselines.hpp"
#include "netdiff/csv.hpp"
#include "netdiff/diagnostics.hpp"
#include "netdiff/errors.hpp"
#include "netdiff/gibbs.hpp"
#include "netdiff/testing.hpp"

namespace netdiff {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

double mean(const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0) / x.size(); }

double median(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const auto k = x.size();
  return k % 2 ? x[k / 2] : 0.5 * (x[k / 2 - 1] + x[k / 2]);
}

ReplicateRecord run_replicate(const ScenarioSpec& base, int replicate, std::uint64_t seed,
                              const StudySettings& settings) {
  ReplicateRecord rec;
  rec.scenario = base.name;
  rec.n = base.n;
  rec.replicate = replicate;
  rec.seed = seed;

  ScenarioSpec spec = base;
  spec.seed = seed;
  const SimulatedData sim = simulate(spec);
  rec.h1_true = (spec.nu1 - spec.nu2).cwiseAbs().maxCoeff() > 0.0;
  rec.edges = sim.delta.size();
  rec.true_alternatives = std::count(sim.delta.begin(), sim.delta.end(), 1);
  auto count_false = [&](const std::vector<bool>& reject) {
    std::size_t f = 0;
    for (std::size_t l = 0; l < reject.size(); ++l) f += reject[l] && sim.delta[l] == 0;
    return f;
  };

  if (settings.runs(StudyMethod::fisher)) {
    const auto fisher = fisher_edge_tests(sim.data, settings.fisher_q);
    rec.fisher_rejections = fisher.rejections();
    rec.fisher_false = count_false(fisher.reject);
    std::vector<double> score(fisher.adjusted.size());
    for (std::size_t l = 0; l < score.size(); ++l) score[l] = 1.0 - fisher.adjusted[l];
    rec.fisher_auc = auc(score, sim.delta);
  }
  if (settings.runs(StudyMethod::manova)) {
    const auto m = manova_summary_test(sim.data, settings.manova_alpha);
    rec.manova_p = m.p_value;
    rec.manova_reject = m.reject;
  }
  if (settings.runs(StudyMethod::mixture)) {
    try {
      GibbsConfig config = settings.gibbs;
      config.n_chains = 1;
      config.seed = derive_seed(seed, 0x6d6978, 0);
      Rng rng = make_rng(config.seed);
      const PosteriorChain chain = run_chain(sim.data, settings.hyper, config, rng);
      const auto global = global_test(chain, settings.global_threshold);
      const auto local = local_tests(chain, settings.epsilon, settings.local_threshold);
      rec.pr_h1 = global.pr_h1;
      rec.global_reject = global.reject;
      rec.local_rejections = local.rejections();
      rec.local_false = count_false(local.reject);
      rec.auc = auc(std::span<const double>(local.pr.data(), local.pr.size()), sim.delta);
      const auto diag = diagnose(std::span<const PosteriorChain>(&chain, 1));
      rec.max_psrf = diag.max_psrf();
      rec.median_ess = diag.median_ess();
      rec.stored = static_cast<double>(chain.size());
      rec.between_separation1 = rec.between_separation2 = kNaN;
      if (chain.predictive[0].size() > 0) {
        const Eigen::VectorXd b1 = chain.predictive[0].col(4);
        const Eigen::VectorXd b2 = chain.predictive[1].col(4);
        rec.between_separation1 = two_means_separation({b1.data(), static_cast<std::size_t>(b1.size())});
        rec.between_separation2 = two_means_separation({b2.data(), static_cast<std::size_t>(b2.size())});
      }
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.error = e.what();
    }
  }
  return rec;
}

std::optional<double> ratio(double num, double den) {
  if (den <= 0.0) return std::nullopt;
  return num / den;
}

}  // namespace

std::string to_string(StudyMethod m) {
  switch (m) {
    case StudyMethod::mixture:
      return "mixture";
    case StudyMethod::fisher:
      return "fisher";
    case StudyMethod::manova:
      return "manova";
  }
  return "?";
}

StudyMethod parse_study_method(const std::string& name) {
  if (name == "mixture" || name == "mixture-model") return StudyMethod::mixture;
  if (name == "fisher" || name == "fisher+BH" || name == "fisher-bh") return StudyMethod::fisher;
  if (name == "manova" || name == "MANOVA") return StudyMethod::manova;
  throw ContractError("unknown method '" + name + "' (expected mixture, fisher or manova)");
}

bool StudySettings::runs(StudyMethod m) const { return std::find(methods.begin(), methods.end(), m) != methods.end(); }

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ContractError("auc: scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return scores[i] < scores[j]; });
  // Mann-Whitney U from mid-ranks.
  double rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid = 0.5 * (i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        rank_sum += mid;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = scores.size() - positives;
  if (positives == 0 || negatives == 0) return kNaN;
  const double u = rank_sum - 0.5 * positives * (positives + 1.0);
  return u / (static_cast<double>(positives) * static_cast<double>(negatives));
}

double two_means_separation(std::span<const double> values) {
  std::vector<double> x;
  for (double v : values) {
    if (std::isfinite(v)) x.push_back(v);
  }
  if (x.size() < 2) return 0.0;
  std::sort(x.begin(), x.end());
  const double total_mean = mean(x);
  double sst = 0.0;
  for (double v : x) sst += (v - total_mean) * (v - total_mean);
  if (sst <= 0.0) return 0.0;
  const double n = static_cast<double>(x.size());
  double best = 0.0;
  double left = 0.0;
  for (std::size_t k = 1; k < x.size(); ++k) {
    left += x[k - 1];
    if (x[k] == x[k - 1]) continue;
    const double m1 = left / k;
    const double m2 = (total_mean * n - left) / (n - k);
    const double between = k * (m1 - total_mean) * (m1 - total_mean) + (n - k) * (m2 - total_mean) * (m2 - total_mean);
    best = std::max(best, between / sst);
  }
  return best;
}

std::vector<ScorePanel> score_panels(std::span<const ReplicateRecord> records, const StudySettings& settings,
                                     const std::string& label) {
  std::vector<ScorePanel> panels;
  const bool any_alternatives =
      std::any_of(records.begin(), records.end(), [](const ReplicateRecord& r) { return r.true_alternatives > 0; });

  for (StudyMethod method : settings.methods) {
    ScorePanel p;
    p.method = to_string(method);
    p.label = label;
    std::vector<const ReplicateRecord*> ok;
    for (const auto& r : records) {
      if (method == StudyMethod::mixture && r.failed) {
        ++p.failures;
      } else {
        ok.push_back(&r);
      }
    }
    p.replicates = static_cast<int>(ok.size());

    if (method != StudyMethod::fisher) {
      double h0 = 0, h1 = 0, false_pos = 0, false_neg = 0;
      for (const auto* r : ok) {
        const bool reject = method == StudyMethod::mixture ? r->global_reject : r->manova_reject;
        if (r->h1_true) {
          ++h1;
          false_neg += !reject;
        } else {
          ++h0;
          false_pos += reject;
        }
      }
      p.global_type1 = ratio(false_pos, h0);
      p.global_type2 = ratio(false_neg, h1);
    }
    if (method != StudyMethod::manova) {
      double nulls = 0, alts = 0, false_rej = 0, missed = 0, any_false = 0, fdp = 0, scoped = 0;
      std::vector<double> aucs;
      for (const auto* r : ok) {
        if (any_alternatives && r->true_alternatives == 0) continue;
        const std::size_t rejections = method == StudyMethod::mixture ? r->local_rejections : r->fisher_rejections;
        const std::size_t false_r = method == StudyMethod::mixture ? r->local_false : r->fisher_false;
        const std::size_t true_r = rejections - false_r;
        ++scoped;
        nulls += static_cast<double>(r->edges - r->true_alternatives);
        alts += static_cast<double>(r->true_alternatives);
        false_rej += static_cast<double>(false_r);
        missed += static_cast<double>(r->true_alternatives - true_r);
        any_false += false_r > 0;
        fdp += rejections > 0 ? static_cast<double>(false_r) / rejections : 0.0;
        const double a = method == StudyMethod::mixture ? r->auc : r->fisher_auc;
        if (std::isfinite(a)) aucs.push_back(a);
      }
      p.local_type1 = ratio(false_rej, nulls);
      p.local_type2 = ratio(missed, alts);
      p.fwer = ratio(any_false, scoped);
      p.fdr = ratio(fdp, scoped);
      if (!aucs.empty()) {
        p.auc_min = *std::min_element(aucs.begin(), aucs.end());
        p.auc_max = *std::max_element(aucs.begin(), aucs.end());
        p.auc_mean = mean(aucs);
        p.auc_median = median(aucs);
      }
    }
    panels.push_back(std::move(p));
  }
  return panels;
}

StudyResult run_study(const std::vector<ScenarioSpec>& scenarios, const StudySettings& settings,
                      const std::string& label) {
  if (settings.replicates < 1) throw ContractError("run_study: replicates must be >= 1");
  struct Job {
    std::size_t scenario;
    int replicate;
  };
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    for (int r = 0; r < settings.replicates; ++r) jobs.push_back({s, r});
  }
  StudyResult result;
  result.label = label;
  result.records.resize(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      try {
        const auto& job = jobs[k];
        const std::uint64_t seed = derive_seed(settings.seed, job.scenario, static_cast<std::uint64_t>(job.replicate));
        result.records[k] = run_replicate(scenarios[job.scenario], job.replicate, seed, settings);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int workers = std::clamp(settings.threads, 1, static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
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
  result.panels = score_panels(result.records, settings, label);
  return result;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"table1-desk", "samplesize-sweep", "scenario2"};
  return names;
}

std::vector<StudyResult> run_preset(const std::string& preset, const StudySettings& settings) {
  if (preset == "table1-desk") {
    return {run_study({scenario1_spec(true, 0), scenario1_spec(false, 0)}, settings, "table1-desk")};
  }
  if (preset == "samplesize-sweep") {
    std::vector<StudyResult> out;
    for (int n : {20, 40, 100}) {
      out.push_back(run_study({scenario1_spec(true, 0, n), scenario1_spec(false, 0, n)}, settings,
                              "n=" + std::to_string(n)));
    }
    return out;
  }
  if (preset == "scenario2") return {run_study({scenario2_spec(0)}, settings, "scenario2")};
  throw ContractError("unknown study preset '" + preset + "'");
}

nlohmann::json to_json(const ScorePanel& p) {
  auto opt = [](const std::optional<double>& x) { return x ? nlohmann::json(*x) : nlohmann::json(nullptr); };
  return {{"method", p.method},
          {"label", p.label},
          {"replicates", p.replicates},
          {"failures", p.failures},
          {"global_type1", opt(p.global_type1)},
          {"global_type2", opt(p.global_type2)},
          {"local_type1", opt(p.local_type1)},
          {"local_type2", opt(p.local_type2)},
          {"fwer", opt(p.fwer)},
          {"fdr", opt(p.fdr)},
          {"auc", {{"min", opt(p.auc_min)}, {"mean", opt(p.auc_mean)}, {"median", opt(p.auc_median)},
                   {"max", opt(p.auc_max)}}}};
}

nlohmann::json to_json(const StudyResult& r) {
  nlohmann::json panels = nlohmann::json::array();
  for (const auto& p : r.panels) panels.push_back(to_json(p));
  std::size_t failures = 0;
  for (const auto& rec : r.records) failures += rec.failed;
  return {{"label", r.label}, {"replicate_records", r.records.size()}, {"failed_fits", failures},
          {"panels", panels}};
}

void write_ledger(std::span<const ReplicateRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "scenario,n,replicate,seed,h1_true,true_alternatives,failed,pr_h1,global_reject,local_rejections,"
         "local_false,auc,max_psrf,median_ess,stored,between_separation1,between_separation2,fisher_rejections,"
         "fisher_false,fisher_auc,manova_p,manova_reject,error\n";
  for (const auto& r : records) {
    std::string error = r.error;
    std::replace(error.begin(), error.end(), ',', ';');
    std::replace(error.begin(), error.end(), '\n', ' ');
    out << r.scenario << ',' << r.n << ',' << r.replicate << ',' << r.seed << ',' << r.h1_true << ','
        << r.true_alternatives << ',' << r.failed << ',' << csv::format(r.pr_h1) << ',' << r.global_reject << ','
        << r.local_rejections << ',' << r.local_false << ',' << csv::format(r.auc) << ','
        << csv::format(r.max_psrf) << ',' << csv::format(r.median_ess) << ',' << csv::format(r.stored) << ','
        << csv::format(r.between_separation1) << ',' << csv::format(r.between_separation2) << ','
        << r.fisher_rejections << ',' << r.fisher_false << ',' << csv::format(r.fisher_auc) << ','
        << csv::format(r.manova_p) << ',' << r.manova_reject << ',' << error << '\n';
  }
}

}  // namespace netdiff
