#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "netdiff/chain.hpp"
#include "netdiff/scenario.hpp"

namespace netdiff {

enum class StudyMethod { mixture, fisher, manova };

std::string to_string(StudyMethod m);
StudyMethod parse_study_method(const std::string& name);

struct StudySettings {
  int replicates = 25;
  std::uint64_t seed = 1;
  int threads = 1;
  Hyperparameters hyper;
  GibbsConfig gibbs;
  double global_threshold = 0.9;
  double epsilon = 0.1;
  double local_threshold = 0.9;
  double fisher_q = 0.1;
  double manova_alpha = 0.1;
  std::vector<StudyMethod> methods{StudyMethod::mixture, StudyMethod::fisher, StudyMethod::manova};

  bool runs(StudyMethod m) const;
};

struct ReplicateRecord {
  std::string scenario;
  int n = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
  bool h1_true = false;
  std::size_t true_alternatives = 0;
  std::size_t edges = 0;
  bool failed = false;
  std::string error;

  double pr_h1 = 0.0;
  bool global_reject = false;
  std::size_t local_rejections = 0;
  std::size_t local_false = 0;
  double auc = 0.0;  // NaN when delta has a single class
  double max_psrf = 0.0;
  double median_ess = 0.0;
  double stored = 0.0;
  /// Two-means separation of the posterior-predictive between-block edge count, per group.
  double between_separation1 = 0.0;
  double between_separation2 = 0.0;

  std::size_t fisher_rejections = 0;
  std::size_t fisher_false = 0;
  double fisher_auc = 0.0;

  double manova_p = 1.0;
  bool manova_reject = false;
};

struct ScorePanel {
  std::string method;
  std::string label;
  int replicates = 0;
  int failures = 0;
  std::optional<double> global_type1;
  std::optional<double> global_type2;
  std::optional<double> local_type1;
  std::optional<double> local_type2;
  std::optional<double> fwer;
  std::optional<double> fdr;
  std::optional<double> auc_min;
  std::optional<double> auc_mean;
  std::optional<double> auc_median;
  std::optional<double> auc_max;
};

struct StudyResult {
  std::string label;
  std::vector<ReplicateRecord> records;
  std::vector<ScorePanel> panels;
};

/// Area under the ROC curve of `scores` against binary `labels`
/// (Mann-Whitney form, ties count one half). NaN when a class is empty.
double auc(std::span<const double> scores, std::span<const int> labels);

/// Largest between-cluster share of variance over all two-group splits of the
/// sorted values: about 0.64 for a normal sample, near 1 for well separated modes.
double two_means_separation(std::span<const double> values);

/// Fits and tests `replicates` datasets per scenario template (the template seed
/// is replaced by a per-replicate stream) and scores every requested method.
StudyResult run_study(const std::vector<ScenarioSpec>& scenarios, const StudySettings& settings,
                      const std::string& label = "study");

/// Global rates over all replicates; local rates over replicates with at least
/// one true local alternative, or over all replicates when there are none.
std::vector<ScorePanel> score_panels(std::span<const ReplicateRecord> records, const StudySettings& settings,
                                     const std::string& label);

/// Presets: table1-desk, samplesize-sweep (n = 20, 40, 100), scenario2.
std::vector<StudyResult> run_preset(const std::string& preset, const StudySettings& settings);
const std::vector<std::string>& preset_names();

nlohmann::json to_json(const ScorePanel& p);
nlohmann::json to_json(const StudyResult& r);
void write_ledger(std::span<const ReplicateRecord> records, const std::filesystem::path& path);

}  // namespace netdiff
