#include "netdiff/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "netdiff/edge_index.hpp"
#include "netdiff/errors.hpp"
#include "netdiff/model.hpp"
#include "netdiff/random.hpp"

using nlohmann::json;

namespace netdiff {

namespace {

// Loading of the active nodes in scenario 1; the factor products are +-2.25.
constexpr double kScenario1Loading = 1.5;

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index cols_if_empty = 0) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j.at(0).size()) : cols_if_empty;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j.at(i).size()) != cols) throw FormatError("scenario: ragged matrix");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = j.at(i).at(k).get<double>();
  }
  return m;
}

Eigen::VectorXd vector_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<int> two_blocks(int v, int first) {
  std::vector<int> blocks(v, 1);
  std::fill(blocks.begin(), blocks.begin() + first, 0);
  return blocks;
}

}  // namespace

Eigen::VectorXd ScenarioSpec::z() const {
  const auto& index = *EdgeIndex::of(v);
  Eigen::VectorXd out(static_cast<Eigen::Index>(index.size()));
  for (std::size_t l = 0; l < index.size(); ++l) {
    auto [row, col] = index.pair(l);
    out[l] = block_logodds(blocks[row], blocks[col]);
  }
  return out;
}

Eigen::MatrixXd ScenarioSpec::component_probs() const {
  const auto& index = *EdgeIndex::of(v);
  const Eigen::VectorXd base = z();
  Eigen::MatrixXd pi(base.size(), h_true());
  for (int h = 0; h < h_true(); ++h) {
    const auto& c = components[h];
    for (std::size_t l = 0; l < index.size(); ++l) {
      auto [row, col] = index.pair(l);
      double psi = base[l] + c.block_offset(blocks[row], blocks[col]);
      if (c.lambda.size() > 0) psi += (c.x.row(row).array() * c.x.row(col).array() * c.lambda.transpose().array()).sum();
      pi(l, h) = logistic(psi);
    }
  }
  return pi;
}

Eigen::VectorXd ScenarioSpec::group_probs(int y) const { return component_probs() * (y == 1 ? nu1 : nu2); }

std::vector<int> ScenarioSpec::truth() const {
  const Eigen::MatrixXd pi = component_probs();
  const Eigen::VectorXd diff = pi * (nu1 - nu2);
  std::vector<int> delta(diff.size());
  for (Eigen::Index l = 0; l < diff.size(); ++l) delta[l] = std::abs(diff[l]) > 1e-12 ? 1 : 0;
  return delta;
}

void ScenarioSpec::validate() const {
  if (v < 2 || n < 0) throw ContractError("scenario " + name + ": need v >= 2 and n >= 0");
  if (static_cast<int>(blocks.size()) != v) throw ContractError("scenario " + name + ": block map must cover every node");
  const int b = block_count();
  if (block_logodds.cols() != b || b < 1) throw ContractError("scenario " + name + ": block log-odds must be square");
  for (int k : blocks) {
    if (k < 0 || k >= b) throw ContractError("scenario " + name + ": block id out of range");
  }
  if (components.empty()) throw ContractError("scenario " + name + ": no components");
  for (const auto& c : components) {
    if (c.block_offset.rows() != b || c.block_offset.cols() != b) {
      throw ContractError("scenario " + name + ": component block offsets must be B x B");
    }
    if (c.x.cols() != c.lambda.size() || (c.lambda.size() > 0 && c.x.rows() != v)) {
      throw ContractError("scenario " + name + ": component factors have inconsistent dimensions");
    }
  }
  for (const auto* nu : {&nu1, &nu2}) {
    if (nu->size() != h_true() || (nu->array() < 0.0).any() || std::abs(nu->sum() - 1.0) > 1e-9) {
      throw ContractError("scenario " + name + ": mixing vectors must be probability vectors of length H");
    }
  }
  if (!(p_y1 > 0.0 && p_y1 < 1.0)) throw ContractError("scenario " + name + ": p_y1 must lie in (0, 1)");
  if (n_group1 > n) throw ContractError("scenario " + name + ": n_group1 exceeds n");
  for (int a : active_nodes) {
    if (a < 0 || a >= v) throw ContractError("scenario " + name + ": active node outside the node set");
  }
}

SimulatedData simulate(const ScenarioSpec& spec) {
  spec.validate();
  Rng rng = make_rng(spec.seed);
  SimulatedData out;
  out.spec = spec;
  out.delta = spec.truth();
  out.data.v = spec.v;
  out.data.blocks = spec.blocks;

  std::vector<int> groups(spec.n);
  if (spec.n_group1 >= 0) {
    std::fill(groups.begin(), groups.end(), 2);
    std::fill(groups.begin(), groups.begin() + spec.n_group1, 1);
    std::shuffle(groups.begin(), groups.end(), rng);
  } else {
    for (auto& g : groups) g = draw_uniform(rng) < spec.p_y1 ? 1 : 2;
  }
  const Eigen::MatrixXd pi = spec.component_probs();
  for (int i = 0; i < spec.n; ++i) {
    auto net = sample_network(pi, groups[i] == 1 ? spec.nu1 : spec.nu2, rng);
    out.data.networks.push_back(std::move(net.edges));
    out.components.push_back(net.component);
  }
  out.data.groups = std::move(groups);
  return out;
}

ScenarioSpec scenario1_spec(bool dependent, std::uint64_t seed, int n) {
  ScenarioSpec s;
  s.name = dependent ? "scenario1-dependent" : "scenario1-independent";
  s.n = n;
  s.v = 20;
  s.blocks = two_blocks(20, 10);
  s.block_logodds.resize(2, 2);
  s.block_logodds << logit(0.5), logit(0.2), logit(0.2), logit(0.5);
  s.active_nodes = {0, 1, 2, 3, 4};
  const std::array<std::array<double, 5>, 2> signs{{{1, 1, 1, -1, -1}, {1, -1, -1, -1, 1}}};
  for (const auto& sign : signs) {
    ComponentSpec c;
    c.block_offset = Eigen::MatrixXd::Zero(2, 2);
    c.x = Eigen::MatrixXd::Zero(20, 1);
    for (int k = 0; k < 5; ++k) c.x(s.active_nodes[k], 0) = kScenario1Loading * sign[k];
    c.lambda = Eigen::VectorXd::Ones(1);
    s.components.push_back(std::move(c));
  }
  s.nu1.resize(2);
  s.nu2.resize(2);
  if (dependent) {
    s.nu1 << 0.8, 0.2;
    s.nu2 << 0.2, 0.8;
  } else {
    s.nu1 << 0.5, 0.5;
    s.nu2 << 0.5, 0.5;
  }
  s.seed = seed;
  return s;
}

ScenarioSpec scenario2_spec(std::uint64_t seed, int n) {
  ScenarioSpec s;
  s.name = "scenario2";
  s.n = n;
  s.v = 20;
  s.blocks = two_blocks(20, 10);
  s.block_logodds.resize(2, 2);
  s.block_logodds << logit(0.75), 0.0, 0.0, logit(0.75);
  for (double between : {0.5, 0.8, 0.2}) {
    ComponentSpec c;
    c.block_offset.resize(2, 2);
    c.block_offset << 0.0, logit(between), logit(between), 0.0;
    c.x.resize(20, 0);
    c.lambda.resize(0);
    s.components.push_back(std::move(c));
  }
  s.nu1.resize(3);
  s.nu2.resize(3);
  s.nu1 << 1.0, 0.0, 0.0;
  s.nu2 << 0.0, 0.5, 0.5;
  s.seed = seed;
  return s;
}

ScenarioSpec synthetic_v68_spec(std::uint64_t seed) {
  ScenarioSpec s;
  s.name = "synthetic-v68";
  s.n = 36;
  s.v = 68;
  s.n_group1 = 19;
  s.blocks = two_blocks(68, 34);
  s.block_logodds.resize(2, 2);
  s.block_logodds << logit(0.35), logit(0.08), logit(0.08), logit(0.35);
  // Factor values come from a fixed stream so the structure does not depend on `seed`.
  Rng rng = make_rng(68);
  for (int h = 0; h < 2; ++h) {
    ComponentSpec c;
    c.block_offset = Eigen::MatrixXd::Zero(2, 2);
    c.x.resize(68, 2);
    for (Eigen::Index i = 0; i < c.x.size(); ++i) c.x.data()[i] = 0.8 * draw_normal(rng);
    c.lambda = Eigen::VectorXd::Ones(2);
    s.components.push_back(std::move(c));
  }
  s.nu1.resize(2);
  s.nu2.resize(2);
  s.nu1 << 0.7, 0.3;
  s.nu2 << 0.3, 0.7;
  s.seed = seed;
  return s;
}

SimulatedData make_scenario1(bool dependent, std::uint64_t seed, int n) {
  return simulate(scenario1_spec(dependent, seed, n));
}

SimulatedData make_scenario2(std::uint64_t seed, int n) { return simulate(scenario2_spec(seed, n)); }

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"scenario1-dependent", "scenario1-independent", "scenario2",
                                              "synthetic-v68"};
  return names;
}

ScenarioSpec scenario_by_name(const std::string& name, std::uint64_t seed, int n) {
  if (name == "scenario1-dependent") return scenario1_spec(true, seed, n > 0 ? n : 50);
  if (name == "scenario1-independent") return scenario1_spec(false, seed, n > 0 ? n : 50);
  if (name == "scenario2") return scenario2_spec(seed, n > 0 ? n : 50);
  if (name == "synthetic-v68") {
    auto s = synthetic_v68_spec(seed);
    if (n > 0) {
      s.n = n;
      s.n_group1 = -1;
    }
    return s;
  }
  throw ContractError("unknown scenario '" + name + "'");
}

void to_json(json& j, const ScenarioSpec& s) {
  json comps = json::array();
  for (const auto& c : s.components) {
    comps.push_back({{"block_offset", matrix_json(c.block_offset)},
                     {"x", matrix_json(c.x)},
                     {"lambda", std::vector<double>(c.lambda.data(), c.lambda.data() + c.lambda.size())}});
  }
  j = json{{"name", s.name},
           {"n", s.n},
           {"v", s.v},
           {"h_true", s.h_true()},
           {"blocks", s.blocks},
           {"block_logodds", matrix_json(s.block_logodds)},
           {"components", comps},
           {"nu1", std::vector<double>(s.nu1.data(), s.nu1.data() + s.nu1.size())},
           {"nu2", std::vector<double>(s.nu2.data(), s.nu2.data() + s.nu2.size())},
           {"p_y1", s.p_y1},
           {"n_group1", s.n_group1},
           {"active_nodes", s.active_nodes},
           {"seed", s.seed}};
}

void from_json(const json& j, ScenarioSpec& s) {
  try {
    s.name = j.value("name", std::string("custom"));
    s.n = j.at("n").get<int>();
    s.v = j.at("v").get<int>();
    s.blocks = j.at("blocks").get<std::vector<int>>();
    s.block_logodds = matrix_from_json(j.at("block_logodds"));
    s.components.clear();
    for (const auto& c : j.at("components")) {
      ComponentSpec comp;
      comp.block_offset = matrix_from_json(c.at("block_offset"));
      comp.lambda = vector_from_json(c.at("lambda"));
      comp.x = matrix_from_json(c.at("x"), comp.lambda.size());
      if (comp.lambda.size() == 0) comp.x.resize(s.v, 0);
      s.components.push_back(std::move(comp));
    }
    s.nu1 = vector_from_json(j.at("nu1"));
    s.nu2 = vector_from_json(j.at("nu2"));
    s.p_y1 = j.value("p_y1", 0.5);
    s.n_group1 = j.value("n_group1", -1);
    s.active_nodes = j.value("active_nodes", std::vector<int>{});
    s.seed = j.value("seed", std::uint64_t{1});
  } catch (const json::exception& e) {
    throw FormatError(std::string("scenario spec: ") + e.what());
  }
}

}  // namespace netdiff
