#include "netdiff/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "netdiff/baselines.hpp"
#include "netdiff/csv.hpp"
#include "netdiff/dataset_io.hpp"
#include "netdiff/diagnostics.hpp"
#include "netdiff/errors.hpp"
#include "netdiff/gibbs.hpp"
#include "netdiff/scenario.hpp"
#include "netdiff/serialize.hpp"
#include "netdiff/study.hpp"
#include "netdiff/testing.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace netdiff::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class T>
void apply(const std::optional<T>& flag, T& field) {
  if (flag) field = *flag;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

/// Everything a command resolves from flags, an optional config file and defaults.
struct Settings {
  Hyperparameters hyper;
  GibbsConfig gibbs;
  double epsilon = 0.1;
  double global_threshold = 0.9;
  double local_threshold = 0.9;
  std::optional<double> fdr_target;
  double fisher_q = 0.1;
  double manova_alpha = 0.1;
  bool baselines = true;
  int threads = 1;

  json to_json() const {
    json j{{"hyperparameters", hyper},
           {"gibbs", gibbs},
           {"testing",
            {{"epsilon", epsilon},
             {"global_threshold", global_threshold},
             {"local_threshold", local_threshold},
             {"fdr_target", fdr_target ? json(*fdr_target) : json(nullptr)}}},
           {"baselines", {{"enabled", baselines}, {"fisher_q", fisher_q}, {"manova_alpha", manova_alpha}}},
           {"threads", threads}};
    return j;
  }
};

struct Flags {
  std::string config;
  std::optional<int> h_max, r_max;
  std::optional<double> beta_a, beta_b, z_mean, z_var, mig_a1, mig_a2, prior_h1, dirichlet_conc;
  std::optional<int> n_iter, burn_in, thin, n_chains, snapshot_thin;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> pg_method;
  bool no_predictive = false;
  std::optional<double> epsilon, global_threshold, local_threshold, fdr_target, fisher_q, manova_alpha;
  bool no_baselines = false;
  std::optional<int> threads;

  void add_model(CLI::App* app) {
    app->add_option("--config", config, "JSON config file (flags take precedence)")->check(CLI::ExistingFile);
    app->add_option("--H", h_max, "upper bound on mixture components");
    app->add_option("--R", r_max, "upper bound on latent dimensions");
    app->add_option("--beta-a", beta_a, "Beta prior shape a for p_Y(1)");
    app->add_option("--beta-b", beta_b, "Beta prior shape b for p_Y(1)");
    app->add_option("--z-mean", z_mean, "prior mean of shared log-odds");
    app->add_option("--z-var", z_var, "prior variance of shared log-odds");
    app->add_option("--mig-a1", mig_a1, "first MIG shape");
    app->add_option("--mig-a2", mig_a2, "subsequent MIG shapes");
    app->add_option("--prior-h1", prior_h1, "prior probability of the global alternative");
    app->add_option("--dirichlet-conc", dirichlet_conc, "Dirichlet concentration per component (default 1/H)");
    app->add_option("--iter", n_iter, "Gibbs iterations");
    app->add_option("--burn-in", burn_in, "discarded iterations");
    app->add_option("--thin", thin, "keep every k-th post-burn-in draw");
    app->add_option("--chains", n_chains, "number of chains");
    app->add_option("--snapshot-thin", snapshot_thin, "keep prediction parameters every k stored draws");
    app->add_option("--seed", seed, "random seed (fallback: NETDIFF_SEED)");
    app->add_option("--pg-method", pg_method, "Polya-gamma sampler: exact or truncated-sum");
    app->add_flag("--no-predictive", no_predictive, "skip posterior-predictive summary statistics");
    app->add_option("--epsilon", epsilon, "interval-null half-width for local tests");
    app->add_option("--global-threshold", global_threshold, "reject the global null above this probability");
    app->add_option("--local-threshold", local_threshold, "reject local nulls above this probability");
    app->add_option("--threads", threads, "worker threads (chains or replicates)");
  }
  void add_reporting(CLI::App* app) {
    app->add_option("--fdr-target", fdr_target, "also report the Bayesian FDR cutoff at this level");
    app->add_option("--fisher-q", fisher_q, "Benjamini-Hochberg level for Fisher tests");
    app->add_option("--manova-alpha", manova_alpha, "MANOVA level");
    app->add_flag("--no-baselines", no_baselines, "skip Fisher and MANOVA baselines");
  }

  Settings resolve() const {
    Settings s;
    if (const char* env = std::getenv("NETDIFF_SEED"); env && *env) {
      try {
        s.gibbs.seed = std::stoull(env);
      } catch (const std::exception&) {
        throw UsageError(std::string("NETDIFF_SEED is not an unsigned integer: ") + env);
      }
    }
    if (!config.empty()) {
      const json j = read_json(config);
      try {
        if (j.contains("hyperparameters")) j.at("hyperparameters").get_to(s.hyper);
        if (j.contains("gibbs")) j.at("gibbs").get_to(s.gibbs);
        if (j.contains("testing")) {
          const auto& t = j.at("testing");
          s.epsilon = t.value("epsilon", s.epsilon);
          s.global_threshold = t.value("global_threshold", s.global_threshold);
          s.local_threshold = t.value("local_threshold", s.local_threshold);
          if (t.contains("fdr_target") && !t.at("fdr_target").is_null()) s.fdr_target = t.at("fdr_target").get<double>();
        }
        if (j.contains("baselines")) {
          const auto& b = j.at("baselines");
          s.baselines = b.value("enabled", s.baselines);
          s.fisher_q = b.value("fisher_q", s.fisher_q);
          s.manova_alpha = b.value("manova_alpha", s.manova_alpha);
        }
        s.threads = j.value("threads", s.threads);
      } catch (const json::exception& e) {
        throw UsageError(config + ": " + e.what());
      }
    }
    apply(h_max, s.hyper.h_max);
    apply(r_max, s.hyper.r_max);
    apply(beta_a, s.hyper.beta_a);
    apply(beta_b, s.hyper.beta_b);
    apply(z_mean, s.hyper.z_mean);
    apply(z_var, s.hyper.z_var);
    apply(mig_a1, s.hyper.mig_a1);
    apply(mig_a2, s.hyper.mig_a2);
    apply(prior_h1, s.hyper.prior_h1);
    if (dirichlet_conc) s.hyper.dirichlet_conc = *dirichlet_conc;
    apply(n_iter, s.gibbs.n_iter);
    apply(burn_in, s.gibbs.burn_in);
    apply(thin, s.gibbs.thin);
    apply(n_chains, s.gibbs.n_chains);
    apply(snapshot_thin, s.gibbs.snapshot_thin);
    apply(seed, s.gibbs.seed);
    if (pg_method) s.gibbs.pg_method = parse_pg_method(*pg_method);
    if (no_predictive) s.gibbs.predictive = false;
    apply(epsilon, s.epsilon);
    apply(global_threshold, s.global_threshold);
    apply(local_threshold, s.local_threshold);
    if (fdr_target) s.fdr_target = fdr_target;
    apply(fisher_q, s.fisher_q);
    apply(manova_alpha, s.manova_alpha);
    if (no_baselines) s.baselines = false;
    apply(threads, s.threads);
    s.hyper.validate();
    s.gibbs.validate();
    if (s.threads < 1) throw UsageError("--threads must be >= 1");
    return s;
  }
};

/// Output directory that refuses to clobber existing content and records every file written.
class Outputs {
 public:
  Outputs(fs::path root, bool force) : root_(std::move(root)) {
    if (fs::exists(root_) && !fs::is_directory(root_)) throw UsageError(root_.string() + " exists and is not a directory");
    if (fs::exists(root_) && !fs::is_empty(root_) && !force) {
      throw UsageError("output directory " + root_.string() + " is not empty (use --force to overwrite)");
    }
    fs::create_directories(root_);
  }
  fs::path file(const std::string& name) {
    files_.push_back(name);
    return root_ / name;
  }
  void add_tree(const fs::path& dir) {
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
      if (entry.is_regular_file()) files_.push_back(fs::relative(entry.path(), root_).generic_string());
    }
  }
  const fs::path& root() const { return root_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path root_;
  std::vector<std::string> files_;
};

class Manifest {
 public:
  explicit Manifest(std::string command) : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::ostringstream ts;
    ts << std::put_time(std::gmtime(&now), "%FT%TZ");
    started_ = ts.str();
  }
  void input(const std::string& role, const fs::path& path) {
    if (fs::is_directory(path)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::recursive_directory_iterator(path)) {
        if (e.is_regular_file()) files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) inputs_.push_back({{"role", role}, {"path", f.string()}, {"fnv1a64", file_hash(f)}});
    } else {
      inputs_.push_back({{"role", role}, {"path", path.string()}, {"fnv1a64", file_hash(path)}});
    }
  }
  json config = json::object();
  json seeds = json::object();

  void write(Outputs& out) {
    const fs::path path = out.file("manifest.json");
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_json(path, {{"command", command_},
                      {"version", NETDIFF_VERSION},
                      {"started_utc", started_},
                      {"wall_clock_seconds", wall},
                      {"config", config},
                      {"seeds", seeds},
                      {"inputs", inputs_},
                      {"outputs", out.files()}});
  }

 private:
  std::string command_;
  std::chrono::steady_clock::time_point start_;
  std::string started_;
  json inputs_ = json::array();
};

std::vector<std::uint64_t> chain_seeds(const GibbsConfig& g) {
  std::vector<std::uint64_t> out;
  for (int k = 0; k < g.n_chains; ++k) out.push_back(k);
  return out;
}

Eigen::VectorXd column_mean(const Eigen::MatrixXd& m) { return m.colwise().mean().transpose(); }

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string scenario;
  std::string spec;
  std::optional<std::uint64_t> seed;
  int n = 0;
  std::string out;
  bool force = false;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& os) {
  if (a.scenario.empty() == a.spec.empty()) throw UsageError("give exactly one of --scenario or --spec");
  std::uint64_t seed = 1;
  if (const char* env = std::getenv("NETDIFF_SEED"); env && *env) seed = std::stoull(env);
  ScenarioSpec spec;
  if (!a.spec.empty()) {
    spec = read_json(a.spec).get<ScenarioSpec>();
    if (a.seed) spec.seed = *a.seed;
    if (a.n > 0) spec.n = a.n;
  } else {
    try {
      spec = scenario_by_name(a.scenario, a.seed.value_or(seed), a.n);
    } catch (const ContractError& e) {
      std::string names;
      for (const auto& n : scenario_names()) names += " " + n;
      throw UsageError(std::string(e.what()) + "; known scenarios:" + names);
    }
  }
  Manifest manifest("simulate");
  if (!a.spec.empty()) manifest.input("scenario_spec", a.spec);
  Outputs out(a.out, a.force);
  const SimulatedData sim = simulate(spec);
  save_dataset(sim.data, out.file("networks.csv"), out.file("groups.csv"), out.file("blocks.csv"));
  Eigen::MatrixXd truth(static_cast<Eigen::Index>(sim.delta.size()), 1);
  for (std::size_t l = 0; l < sim.delta.size(); ++l) truth(l, 0) = sim.delta[l];
  csv::write_matrix(out.file("truth.csv"), truth, {"delta"});
  Eigen::MatrixXd comps(static_cast<Eigen::Index>(sim.components.size()), 1);
  for (std::size_t i = 0; i < sim.components.size(); ++i) comps(i, 0) = sim.components[i] + 1;
  csv::write_matrix(out.file("components.csv"), comps, {"component"});
  write_json(out.file("scenario.json"), spec);
  manifest.config = {{"scenario", spec.name}, {"n", spec.n}, {"v", spec.v}};
  manifest.seeds = {{"scenario", spec.seed}};
  manifest.write(out);
  os << "simulated " << spec.name << ": n=" << spec.n << " v=" << spec.v << " edges=" << sim.delta.size()
     << " true local alternatives=" << std::count(sim.delta.begin(), sim.delta.end(), 1) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- fit-test

struct DataArgs {
  std::string networks;
  std::string groups;
  std::string blocks;
  std::string format = "csv";
};

struct FitArgs {
  DataArgs data;
  Flags flags;
  std::string out;
  bool force = false;
};

int cmd_fit_test(const FitArgs& a, std::ostream& os) {
  const Settings s = a.flags.resolve();
  const auto format = parse_network_format(a.data.format);
  std::optional<fs::path> blocks;
  if (!a.data.blocks.empty()) blocks = a.data.blocks;
  const NetworkDataset data = load_dataset(a.data.networks, a.data.groups, format, blocks);

  Manifest manifest("fit-test");
  manifest.input("networks", a.data.networks);
  manifest.input("groups", a.data.groups);
  if (blocks) manifest.input("blocks", *blocks);
  if (!a.flags.config.empty()) manifest.input("config", a.flags.config);
  Outputs out(a.out, a.force);

  const auto chains = run_chains(data, s.hyper, s.gibbs, s.threads);
  const PosteriorChain pooled = concatenate(chains);

  TestReport report;
  report.global = global_test(pooled, s.global_threshold);
  report.local = local_tests(pooled, s.epsilon, s.local_threshold);
  if (s.fdr_target) {
    report.fdr_target = s.fdr_target;
    report.fdr = bayes_fdr_threshold({report.local.pr.data(), static_cast<std::size_t>(report.local.pr.size())},
                                     *s.fdr_target);
  }
  std::optional<FisherEdgeTests> fisher;
  if (s.baselines) {
    fisher = fisher_edge_tests(data, s.fisher_q);
    const auto manova = manova_summary_test(data, s.manova_alpha);
    report.baselines = {{"fisher", to_json(*fisher)}, {"manova", to_json(manova)}};
  }
  const DiagnosticsReport diag = diagnose(chains);

  for (const auto& c : chains) save_chain(c, out.root() / "chains" / ("chain_" + std::to_string(c.chain_index)));
  out.add_tree(out.root() / "chains");
  json report_json = to_json(report);
  report_json["n"] = data.size();
  report_json["v"] = data.v;
  report_json["stored_draws"] = pooled.size();
  write_json(out.file("report.json"), report_json);
  write_json(out.file("diagnostics.json"), to_json(diag));

  const int v = data.v;
  csv::write_matrix(out.file("local_pr_matrix.csv"), edge_matrix(v, report.local.pr));
  Eigen::VectorXd decisions(report.local.pr.size());
  for (Eigen::Index l = 0; l < decisions.size(); ++l) decisions[l] = report.local.reject[l] ? 1.0 : 0.0;
  csv::write_matrix(out.file("local_decisions_matrix.csv"), edge_matrix(v, decisions));
  csv::write_matrix(out.file("pibar1_mean_matrix.csv"), edge_matrix(v, column_mean(pooled.pibar1)));
  csv::write_matrix(out.file("pibar2_mean_matrix.csv"), edge_matrix(v, column_mean(pooled.pibar2)));
  csv::write_matrix(out.file("pibar_diff_mean_matrix.csv"),
                    edge_matrix(v, column_mean(pooled.pibar2 - pooled.pibar1)));
  csv::write_matrix(out.file("rho_mean_matrix.csv"), edge_matrix(v, column_mean(pooled.rho)));
  if (fisher) {
    const Eigen::Map<const Eigen::VectorXd> cal(fisher->calibrated.data(),
                                                static_cast<Eigen::Index>(fisher->calibrated.size()));
    csv::write_matrix(out.file("fisher_calibrated_matrix.csv"), edge_matrix(v, cal));
  }
  const std::vector<std::string> pred_header(kPredictiveColumns.begin(), kPredictiveColumns.end());
  for (int y = 0; y < 2; ++y) {
    if (pooled.predictive[y].size() == 0) continue;
    csv::write_matrix(out.file("predictive_group" + std::to_string(y + 1) + ".csv"), pooled.predictive[y],
                      pred_header);
  }

  manifest.config = s.to_json();
  manifest.seeds = {{"gibbs_seed", s.gibbs.seed}, {"chain_streams", chain_seeds(s.gibbs)}};
  manifest.write(out);

  os << std::setprecision(4) << "pr(H1 | data) = " << report.global.pr_h1 << " (mcse " << report.global.mcse
     << ")" << (report.global.reject ? ", global null rejected" : ", global null not rejected") << '\n'
     << "local rejections: " << report.local.rejections() << " of " << report.local.pr.size() << " edges\n"
     << "max PSRF " << diag.max_psrf() << ", median ESS " << diag.median_ess() << " of " << diag.stored
     << " draws\n";
  return kExitOk;
}

// ---------------------------------------------------------------- study

struct StudyArgs {
  std::string preset;
  std::optional<int> replicates;
  bool full = false;
  std::vector<std::string> methods;
  Flags flags;
  std::string out;
  bool force = false;
};

int cmd_study(const StudyArgs& a, std::ostream& os) {
  const auto& presets = preset_names();
  if (std::find(presets.begin(), presets.end(), a.preset) == presets.end()) {
    std::string names;
    for (const auto& p : presets) names += " " + p;
    throw UsageError("unknown preset '" + a.preset + "'; known presets:" + names);
  }
  const Settings s = a.flags.resolve();
  StudySettings st;
  st.replicates = a.full ? 100 : a.replicates.value_or(a.preset == "scenario2" ? 10 : 25);
  st.seed = s.gibbs.seed;
  st.threads = s.threads;
  st.hyper = s.hyper;
  st.gibbs = s.gibbs;
  st.global_threshold = s.global_threshold;
  st.epsilon = s.epsilon;
  st.local_threshold = s.local_threshold;
  st.fisher_q = s.fisher_q;
  st.manova_alpha = s.manova_alpha;
  if (!a.methods.empty()) {
    st.methods.clear();
    for (const auto& m : a.methods) st.methods.push_back(parse_study_method(m));
  } else if (!s.baselines) {
    st.methods = {StudyMethod::mixture};
  }
  if (st.replicates < 1) throw UsageError("--replicates must be >= 1");

  Manifest manifest("study");
  if (!a.flags.config.empty()) manifest.input("config", a.flags.config);
  Outputs out(a.out, a.force);
  const auto results = run_preset(a.preset, st);

  json panels = json::array();
  std::vector<ReplicateRecord> records;
  for (const auto& r : results) {
    panels.push_back(to_json(r));
    records.insert(records.end(), r.records.begin(), r.records.end());
  }
  write_json(out.file("score_panel.json"), {{"preset", a.preset}, {"replicates", st.replicates}, {"studies", panels}});
  write_ledger(records, out.file("replicates.csv"));

  json config = s.to_json();
  config["preset"] = a.preset;
  config["replicates"] = st.replicates;
  json methods = json::array();
  for (auto m : st.methods) methods.push_back(to_string(m));
  config["methods"] = methods;
  manifest.config = config;
  manifest.seeds = {{"study_seed", st.seed}};
  manifest.write(out);

  std::size_t failures = 0;
  for (const auto& r : records) failures += r.failed;
  for (const auto& r : results) {
    for (const auto& p : r.panels) os << to_json(p).dump() << '\n';
  }
  if (failures > 0) os << "warning: " << failures << " replicate fit(s) failed and were excluded\n";
  return kExitOk;
}

// ---------------------------------------------------------------- predict / diagnose

struct PredictArgs {
  std::string chain;
  std::string networks;
  std::string format = "csv";
  std::string out;
  bool force = false;
};

int cmd_predict(const PredictArgs& a, std::ostream& os) {
  const auto chains = load_chains(a.chain);
  const PosteriorChain pooled = concatenate(chains);
  const auto networks = load_networks(a.networks, parse_network_format(a.format));
  const Eigen::VectorXd pr = predict_group(pooled, networks);

  const fs::path out(a.out);
  if (fs::exists(out) && !a.force) throw UsageError(out.string() + " exists (use --force to overwrite)");
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  Eigen::MatrixXd table(pr.size(), 2);
  for (Eigen::Index i = 0; i < pr.size(); ++i) table.row(i) << static_cast<double>(i + 1), pr[i];
  csv::write_matrix(out, table, {"subject", "pr_group2"});

  const fs::path manifest_dir = out.has_parent_path() ? out.parent_path() : fs::path(".");
  Outputs files(manifest_dir, true);
  files.file(out.filename().string());
  Manifest manifest("predict");
  manifest.input("chain", a.chain);
  manifest.input("networks", a.networks);
  manifest.config = {{"snapshots", pooled.snapshots.size()}, {"format", a.format}};
  manifest.write(files);
  os << "predicted " << pr.size() << " networks from " << pooled.snapshots.size() << " posterior draws\n";
  return kExitOk;
}

struct DiagnoseArgs {
  std::string chain;
  std::string out;
  int parts = 4;
  bool force = false;
};

int cmd_diagnose(const DiagnoseArgs& a, std::ostream& os) {
  const auto chains = load_chains(a.chain);
  const auto diag = diagnose(chains, a.parts);
  const json j = to_json(diag);
  if (a.out.empty()) {
    os << j.dump(2) << '\n';
    return kExitOk;
  }
  const fs::path out(a.out);
  if (fs::exists(out) && !a.force) throw UsageError(out.string() + " exists (use --force to overwrite)");
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_json(out, j);
  const fs::path manifest_dir = out.has_parent_path() ? out.parent_path() : fs::path(".");
  Outputs files(manifest_dir, true);
  files.file(out.filename().string());
  Manifest manifest("diagnose");
  manifest.input("chain", a.chain);
  manifest.config = {{"subchains_per_chain", a.parts}};
  manifest.write(files);
  os << "max PSRF " << diag.max_psrf() << ", median ESS " << diag.median_ess() << " of " << diag.stored
     << " draws\n";
  return kExitOk;
}

}  // namespace

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 15];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian global and local testing of group differences in network-valued data", "netdiff"};
  app.set_version_flag("--version", NETDIFF_VERSION);
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "simulate a scenario dataset with ground truth");
  simulate->add_option("--scenario", sim.scenario, "scenario1-dependent, scenario1-independent, scenario2, synthetic-v68");
  simulate->add_option("--spec", sim.spec, "scenario JSON file instead of a named scenario")->check(CLI::ExistingFile);
  simulate->add_option("--seed", sim.seed, "random seed (fallback: NETDIFF_SEED)");
  simulate->add_option("--n", sim.n, "override the number of observations");
  simulate->add_option("--out", sim.out, "output directory")->required();
  simulate->add_flag("--force", sim.force, "overwrite a non-empty output directory");

  auto add_data = [](CLI::App* cmd, DataArgs& d) {
    cmd->add_option("--networks", d.networks, "networks CSV or adjacency directory")->required()->check(CLI::ExistingPath);
    cmd->add_option("--groups", d.groups, "group labels CSV")->required()->check(CLI::ExistingFile);
    cmd->add_option("--blocks", d.blocks, "node block CSV (for assortativity)")->check(CLI::ExistingFile);
    cmd->add_option("--format", d.format, "csv or adjacency-dir")->check(CLI::IsMember({"csv", "adjacency-dir"}));
  };

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit-test", "fit the mixture model and run global/local tests");
  add_data(fit_cmd, fit.data);
  fit.flags.add_model(fit_cmd);
  fit.flags.add_reporting(fit_cmd);
  fit_cmd->add_option("--out", fit.out, "output directory")->required();
  fit_cmd->add_flag("--force", fit.force, "overwrite a non-empty output directory");

  StudyArgs study;
  auto* study_cmd = app.add_subcommand("study", "replicated simulation study with error-rate panels");
  study_cmd->add_option("--preset", study.preset, "table1-desk, samplesize-sweep or scenario2")->required();
  study_cmd->add_option("--replicates", study.replicates, "replicates per scenario (default 25; 10 for scenario2)");
  study_cmd->add_flag("--full", study.full, "100 replicates per scenario");
  study_cmd->add_option("--methods", study.methods, "subset of mixture, fisher, manova");
  study.flags.add_model(study_cmd);
  study.flags.add_reporting(study_cmd);
  study_cmd->add_option("--out", study.out, "output directory")->required();
  study_cmd->add_flag("--force", study.force, "overwrite a non-empty output directory");

  PredictArgs pred;
  auto* predict = app.add_subcommand("predict", "posterior predictive group-2 probabilities");
  predict->add_option("--chain", pred.chain, "chain directory from fit-test")->required()->check(CLI::ExistingDirectory);
  predict->add_option("--networks", pred.networks, "networks to classify")->required()->check(CLI::ExistingPath);
  predict->add_option("--format", pred.format, "csv or adjacency-dir")->check(CLI::IsMember({"csv", "adjacency-dir"}));
  predict->add_option("--out", pred.out, "output CSV")->required();
  predict->add_flag("--force", pred.force, "overwrite an existing file");

  DiagnoseArgs dg;
  auto* diagnose_cmd = app.add_subcommand("diagnose", "recompute PSRF and ESS from stored chains");
  diagnose_cmd->add_option("--chain", dg.chain, "chain directory")->required()->check(CLI::ExistingDirectory);
  diagnose_cmd->add_option("--subchains", dg.parts, "sub-chains per chain")->check(CLI::PositiveNumber);
  diagnose_cmd->add_option("--out", dg.out, "output JSON (default: stdout)");
  diagnose_cmd->add_flag("--force", dg.force, "overwrite an existing file");

  std::vector<std::string> rev(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rev.begin(), rev.end());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(sim, out);
    if (*fit_cmd) return cmd_fit_test(fit, out);
    if (*study_cmd) return cmd_study(study, out);
    if (*predict) return cmd_predict(pred, out);
    if (*diagnose_cmd) return cmd_diagnose(dg, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ContractError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const LoadError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace netdiff::cli
