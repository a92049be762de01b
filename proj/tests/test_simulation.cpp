#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "netdiff/edge_index.hpp"
#include "netdiff/errors.hpp"
#include "netdiff/scenario.hpp"
#include "netdiff/study.hpp"
#include "test_util.hpp"

using namespace netdiff;

namespace {

double oracle_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[i] != 1 || y[j] != 0) continue;
      pairs += 1;
      wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  return wins / pairs;
}

ReplicateRecord record(bool h1, bool reject, std::size_t alts, std::size_t rejections, std::size_t false_r) {
  ReplicateRecord r;
  r.h1_true = h1;
  r.global_reject = reject;
  r.edges = 10;
  r.true_alternatives = alts;
  r.local_rejections = rejections;
  r.local_false = false_r;
  r.auc = 0.9;
  r.fisher_rejections = 0;
  r.fisher_auc = 0.5;
  r.manova_reject = false;
  return r;
}

StudySettings quick_settings() {
  StudySettings s;
  s.replicates = 1;
  s.gibbs.n_iter = 40;
  s.gibbs.burn_in = 20;
  s.gibbs.n_chains = 2;
  s.gibbs.snapshot_thin = 5;
  s.hyper.h_max = 3;
  s.hyper.r_max = 2;
  return s;
}

}  // namespace

TEST_CASE("scenario 1 construction") {
  const auto dep = scenario1_spec(true, 1);
  CHECK(dep.n == 50);
  CHECK(dep.v == 20);
  CHECK(dep.h_true() == 2);
  CHECK_NOTHROW(dep.validate());
  const auto z = dep.z();
  const auto index = EdgeIndex::of(20);
  double within = 0, between = 0;
  for (std::size_t l = 0; l < index->size(); ++l) {
    auto [row, col] = index->pair(l);
    (dep.blocks[row] == dep.blocks[col] ? within : between) = z[l];
  }
  CHECK(within > between);

  const std::set<int> active(dep.active_nodes.begin(), dep.active_nodes.end());
  for (const auto& c : dep.components) {
    for (int node = 0; node < 20; ++node) {
      if (!active.count(node)) CHECK(c.x.row(node).norm() == 0.0);
    }
  }
  const auto delta = dep.truth();
  std::size_t alternatives = 0;
  for (std::size_t l = 0; l < delta.size(); ++l) {
    if (!delta[l]) continue;
    ++alternatives;
    auto [row, col] = index->pair(l);
    CHECK(active.count(row));
    CHECK(active.count(col));
  }
  CHECK(alternatives > 0);

  const auto indep = scenario1_spec(false, 1);
  CHECK(indep.group_probs(1) == indep.group_probs(2));
  const auto indep_delta = indep.truth();
  CHECK(std::count(indep_delta.begin(), indep_delta.end(), 1) == 0);
}

TEST_CASE("scenario 2 has equal marginals but different mixtures") {
  const auto s = scenario2_spec(3);
  CHECK(s.h_true() == 3);
  CHECK((s.group_probs(1) - s.group_probs(2)).cwiseAbs().maxCoeff() < 1e-12);
  const auto delta = s.truth();
  CHECK(std::count(delta.begin(), delta.end(), 1) == 0);
  CHECK(s.nu1 != s.nu2);
}

TEST_CASE("simulation output shape, determinism and label counts") {
  const auto a = make_scenario1(true, 17);
  const auto b = make_scenario1(true, 17);
  CHECK(a.data.size() == 50);
  CHECK(a.data.networks[0].size() == 190);
  CHECK(a.data.networks == b.data.networks);
  CHECK(a.data.groups == b.data.groups);
  CHECK(a.data.blocks.has_value());
  CHECK(make_scenario1(true, 18).data.networks != a.data.networks);

  const auto v68 = simulate(synthetic_v68_spec(5));
  CHECK(v68.data.size() == 36);
  CHECK(v68.data.v == 68);
  CHECK(v68.data.group_count(1) == 19);

  // empirical group edge frequencies approach the specified marginals
  auto spec = scenario1_spec(true, 9, 4000);
  const auto big = simulate(spec);
  const auto p1 = spec.group_probs(1);
  Eigen::VectorXd freq = Eigen::VectorXd::Zero(p1.size());
  double n1 = 0;
  for (std::size_t i = 0; i < big.data.size(); ++i) {
    if (big.data.groups[i] != 1) continue;
    n1 += 1;
    for (Eigen::Index l = 0; l < freq.size(); ++l) freq[l] += big.data.networks[i][l];
  }
  freq /= n1;
  CHECK((freq - p1).cwiseAbs().maxCoeff() < 5.0 * std::sqrt(0.25 / n1));
}

TEST_CASE("scenario lookup and JSON round trip") {
  for (const auto& name : scenario_names()) CHECK_NOTHROW(scenario_by_name(name, 1));
  CHECK_THROWS_AS(scenario_by_name("scenario9", 1), ContractError);
  CHECK(scenario_by_name("scenario1-dependent", 1, 20).n == 20);
  nlohmann::json j;
  to_json(j, scenario2_spec(4));
  ScenarioSpec back;
  from_json(j, back);
  CHECK(back.component_probs().isApprox(scenario2_spec(4).component_probs(), 1e-15));
  CHECK(simulate(back).data.networks == make_scenario2(4).data.networks);
}

TEST_CASE("AUC matches pairwise counting") {
  Rng rng = make_rng(50);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> s(5 + rng() % 40);
    std::vector<int> y(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = std::round(draw_uniform(rng) * 8) / 8;
      y[i] = static_cast<int>(rng() % 2);
    }
    y[0] = 0;
    y[1] = 1;
    CHECK(auc(s, y) == doctest::Approx(oracle_auc(s, y)).epsilon(1e-12));
  }
  CHECK(std::isnan(auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1})));
}

TEST_CASE("two-means separation") {
  Rng rng = make_rng(51);
  std::vector<double> normal(4000), bimodal(4000);
  for (int k = 0; k < 4000; ++k) {
    normal[k] = draw_normal(rng);
    bimodal[k] = draw_normal(rng) + (k % 2 ? 8.0 : -8.0);
  }
  CHECK(two_means_separation(normal) == doctest::Approx(2.0 / std::numbers::pi).epsilon(0.03));
  CHECK(two_means_separation(bimodal) > 0.9);
  // two points split perfectly
  CHECK(two_means_separation(std::vector<double>{1.0, 3.0}) == doctest::Approx(1.0));
}

TEST_CASE("score panels from hand-made records") {
  const std::vector<ReplicateRecord> records{
      record(true, true, 4, 3, 1),   // one false, two of four true found
      record(true, false, 4, 4, 0),  // global miss
      record(false, true, 0, 1, 1),  // global false alarm, excluded from local scope
      record(false, false, 0, 0, 0),
  };
  StudySettings settings;
  const auto panels = score_panels(records, settings, "hand");
  REQUIRE(panels.size() == 3);
  const auto& mix = panels[0];
  CHECK(mix.method == "mixture");
  CHECK(*mix.global_type1 == 0.5);
  CHECK(*mix.global_type2 == 0.5);
  CHECK(*mix.local_type1 == doctest::Approx(1.0 / 12.0));
  CHECK(*mix.local_type2 == doctest::Approx(2.0 / 8.0));
  CHECK(*mix.fwer == 0.5);
  CHECK(*mix.fdr == doctest::Approx(0.5 * (1.0 / 3.0)));
  CHECK(*mix.auc_mean == doctest::Approx(0.9));
  CHECK(panels[1].method == "fisher");
  CHECK_FALSE(panels[1].global_type1.has_value());
  CHECK(*panels[1].local_type2 == 1.0);
  CHECK(panels[2].method == "manova");
  CHECK_FALSE(panels[2].local_type1.has_value());
  CHECK(*panels[2].global_type2 == 1.0);
}

TEST_CASE("single-replicate study gives degenerate rates") {
  auto settings = quick_settings();
  const auto result = run_study({scenario1_spec(true, 1, 20), scenario1_spec(false, 1, 20)}, settings, "tiny");
  CHECK(result.records.size() == 2);
  for (const auto& p : result.panels) {
    for (const auto& rate : {p.global_type1, p.global_type2, p.fwer}) {
      if (rate) CHECK((*rate == 0.0 || *rate == 1.0));
    }
  }
  const auto again = run_study({scenario1_spec(true, 1, 20), scenario1_spec(false, 1, 20)}, settings, "tiny");
  CHECK(again.records[0].pr_h1 == result.records[0].pr_h1);
  CHECK(again.records[1].seed == result.records[1].seed);
  CHECK(result.records[0].seed != result.records[1].seed);

  testutil::TempDir dir;
  write_ledger(result.records, dir / "replicates.csv");
  CHECK(testutil::read_text(dir / "replicates.csv").find("pr_h1") != std::string::npos);
}

TEST_CASE("presets") {
  const auto names = preset_names();
  CHECK(std::find(names.begin(), names.end(), "table1-desk") != names.end());
  auto settings = quick_settings();
  const auto table = run_preset("table1-desk", settings);
  REQUIRE(table.size() == 1);
  const auto& panels = table[0].panels;
  // eight cells: mixture global and local type I/II, MANOVA global, Fisher local
  CHECK(panels[0].global_type1.has_value());
  CHECK(panels[0].global_type2.has_value());
  CHECK(panels[0].local_type1.has_value());
  CHECK(panels[0].local_type2.has_value());
  CHECK(panels[1].local_type1.has_value());
  CHECK(panels[1].local_type2.has_value());
  CHECK(panels[2].global_type1.has_value());
  CHECK(panels[2].global_type2.has_value());

  settings.methods = {StudyMethod::manova};
  const auto sweep = run_preset("samplesize-sweep", settings);
  REQUIRE(sweep.size() == 3);
  CHECK(sweep[0].records[0].n == 20);
  CHECK(sweep[1].records[0].n == 40);
  CHECK(sweep[2].records[0].n == 100);
  CHECK_THROWS_AS(run_preset("table9", settings), ContractError);
}
