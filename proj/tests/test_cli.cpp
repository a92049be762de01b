#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include <json.hpp>

#include "netdiff/commands.hpp"
#include "netdiff/dataset_io.hpp"
#include "test_util.hpp"

using namespace netdiff;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "netdiff");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& text) { return std::count(text.begin(), text.end(), '\n'); }

std::size_t count_fields(const std::string& line) { return std::count(line.begin(), line.end(), ',') + 1; }

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

nlohmann::json read_json(const std::filesystem::path& p) { return nlohmann::json::parse(testutil::read_text(p)); }

}  // namespace

TEST_CASE("simulate writes n rows of V(V-1)/2 columns, reproducibly") {
  testutil::TempDir dir;
  auto r = invoke({"simulate", "--scenario", "scenario1-dependent", "--seed", "3", "--out", (dir / "a").string()});
  REQUIRE(r.code == cli::kExitOk);
  const auto networks = testutil::read_text(dir / "a" / "networks.csv");
  const auto data = load_dataset(dir / "a" / "networks.csv", dir / "a" / "groups.csv");
  CHECK(data.size() == 50);
  CHECK(data.v == 20);
  CHECK(count_fields(networks.substr(networks.rfind('\n', networks.size() - 2) + 1)) == 190);
  CHECK(std::filesystem::exists(dir / "a" / "truth.csv"));
  const auto manifest = read_json(dir / "a" / "manifest.json");
  CHECK(manifest["command"] == "simulate");
  CHECK(manifest["seeds"]["scenario"] == 3);

  r = invoke({"simulate", "--scenario", "scenario1-dependent", "--seed", "3", "--out", (dir / "b").string()});
  REQUIRE(r.code == cli::kExitOk);
  for (const char* f : {"networks.csv", "groups.csv", "truth.csv", "blocks.csv", "components.csv"}) {
    CHECK(testutil::read_text(dir / "a" / f) == testutil::read_text(dir / "b" / f));
  }
}

TEST_CASE("usage errors exit with code 2") {
  testutil::TempDir dir;
  auto r = invoke({"simulate", "--scenario", "scenario9", "--out", (dir / "x").string()});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("scenario9") != std::string::npos);

  r = invoke({"frobnicate"});
  CHECK(r.code == cli::kExitUsage);

  REQUIRE(invoke({"simulate", "--scenario", "scenario2", "--seed", "1", "--out", (dir / "s").string()}).code == 0);
  r = invoke({"fit-test", "--networks", (dir / "s" / "networks.csv").string(), "--groups",
              (dir / "missing.csv").string(), "--out", (dir / "fit").string()});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("--groups") != std::string::npos);

  testutil::write_text(dir / "bad_groups.csv", "1\n3\n");
  r = invoke({"fit-test", "--networks", (dir / "s" / "networks.csv").string(), "--groups",
              (dir / "bad_groups.csv").string(), "--out", (dir / "fit").string()});
  CHECK(r.code == cli::kExitUsage);

  r = invoke({"fit-test", "--networks", (dir / "s" / "networks.csv").string(), "--groups",
              (dir / "s" / "groups.csv").string(), "--iter", "10", "--burn-in", "20", "--out", (dir / "fit").string()});
  CHECK(r.code == cli::kExitUsage);
}

TEST_CASE("outputs refuse a non-empty directory without --force") {
  testutil::TempDir dir;
  const auto out = (dir / "o").string();
  REQUIRE(invoke({"simulate", "--scenario", "scenario2", "--seed", "1", "--out", out}).code == 0);
  CHECK(invoke({"simulate", "--scenario", "scenario2", "--seed", "2", "--out", out}).code == cli::kExitUsage);
  CHECK(invoke({"simulate", "--scenario", "scenario2", "--seed", "2", "--out", out, "--force"}).code == 0);
}

TEST_CASE("seed falls back to NETDIFF_SEED and flags beat the config file") {
  testutil::TempDir dir;
  ::setenv("NETDIFF_SEED", "41", 1);
  REQUIRE(invoke({"simulate", "--scenario", "scenario2", "--out", (dir / "env").string()}).code == 0);
  ::unsetenv("NETDIFF_SEED");
  CHECK(read_json(dir / "env" / "manifest.json")["seeds"]["scenario"] == 41);
  REQUIRE(invoke({"simulate", "--scenario", "scenario2", "--seed", "41", "--out", (dir / "flag").string()}).code == 0);
  CHECK(testutil::read_text(dir / "env" / "networks.csv") == testutil::read_text(dir / "flag" / "networks.csv"));

  REQUIRE(invoke({"simulate", "--scenario", "scenario1-independent", "--n", "16", "--seed", "2", "--out",
                  (dir / "d").string()})
              .code == 0);
  testutil::write_text(dir / "cfg.json",
                       R"({"hyperparameters": {"h_max": 4, "r_max": 3}, "gibbs": {"n_iter": 30, "burn_in": 10, "seed": 5}})");
  const auto r = invoke({"fit-test", "--networks", (dir / "d" / "networks.csv").string(), "--groups",
                         (dir / "d" / "groups.csv").string(), "--config", (dir / "cfg.json").string(), "--H", "3",
                         "--chains", "2", "--out", (dir / "fit").string()});
  REQUIRE(r.code == 0);
  const auto manifest = read_json(dir / "fit" / "manifest.json");
  CHECK(manifest["config"]["hyperparameters"]["h_max"] == 3);
  CHECK(manifest["config"]["hyperparameters"]["r_max"] == 3);
  CHECK(manifest["config"]["gibbs"]["n_iter"] == 30);
  CHECK(manifest["seeds"]["gibbs_seed"] == 5);
  CHECK(manifest["seeds"]["chain_streams"].size() == 2);
  CHECK(manifest["inputs"].size() >= 2);
}

TEST_CASE("fit-test, predict and diagnose pipeline") {
  testutil::TempDir dir;
  REQUIRE(invoke({"simulate", "--scenario", "scenario1-dependent", "--n", "20", "--seed", "8", "--out",
                  (dir / "d").string()})
              .code == 0);
  const std::vector<std::string> fit{"fit-test", "--networks", (dir / "d" / "networks.csv").string(),
                                     "--groups", (dir / "d" / "groups.csv").string(), "--blocks",
                                     (dir / "d" / "blocks.csv").string(), "--iter", "60", "--burn-in", "20",
                                     "--chains", "2", "--seed", "4", "--fdr-target", "0.1"};
  auto args = fit;
  args.insert(args.end(), {"--out", (dir / "f1").string()});
  REQUIRE(invoke(args).code == 0);
  args = fit;
  args.insert(args.end(), {"--out", (dir / "f2").string(), "--threads", "2"});
  REQUIRE(invoke(args).code == 0);

  const auto report = read_json(dir / "f1" / "report.json");
  CHECK(report["global_pr_h1"].is_number());
  CHECK(report["local_pr"].size() == 190);
  CHECK(report["bayes_fdr"]["target"] == 0.1);
  CHECK(report.contains("baselines"));
  CHECK(testutil::read_text(dir / "f1" / "report.json") == testutil::read_text(dir / "f2" / "report.json"));
  for (const char* f : {"local_pr_matrix.csv", "rho_mean_matrix.csv", "diagnostics.json", "predictive_group2.csv"}) {
    CHECK(std::filesystem::exists(dir / "f1" / f));
  }
  CHECK(count_lines(testutil::read_text(dir / "f1" / "local_pr_matrix.csv")) >= 20);

  auto r = invoke({"predict", "--chain", (dir / "f1" / "chains").string(), "--networks",
                   (dir / "d" / "networks.csv").string(), "--out", (dir / "pred" / "pred.csv").string()});
  REQUIRE(r.code == 0);
  const auto pred = testutil::read_text(dir / "pred" / "pred.csv");
  CHECK(first_line(pred) == "subject,pr_group2");
  CHECK(count_lines(pred) == 21);

  r = invoke({"diagnose", "--chain", (dir / "f1" / "chains").string()});
  REQUIRE(r.code == 0);
  const auto diag = nlohmann::json::parse(r.out);
  CHECK(diag["functionals"].size() == 3 * 190);
}

TEST_CASE("study command writes a score panel") {
  testutil::TempDir dir;
  const auto r = invoke({"study", "--preset", "samplesize-sweep", "--replicates", "1", "--methods", "manova",
                         "--seed", "3", "--out", (dir / "st").string()});
  REQUIRE(r.code == 0);
  const auto panel = read_json(dir / "st" / "score_panel.json");
  CHECK(panel.size() == 3);
  CHECK(count_lines(testutil::read_text(dir / "st" / "replicates.csv")) == 1 + 3 * 2);
}

TEST_CASE("installed binary reports exit codes") {
  testutil::TempDir dir;
  const std::string bin = NETDIFF_CLI_PATH;
  const auto status = [](const std::string& cmd) {
    const int s = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  CHECK(status(bin + " --help") == 0);
  CHECK(status(bin + " simulate --scenario nope --out " + (dir / "x").string()) == 2);
  CHECK(status(bin + " simulate --scenario scenario2 --seed 1 --out " + (dir / "y").string()) == 0);
}
