#include "netdiff/chain.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "netdiff/csv.hpp"
#include "netdiff/edge_index.hpp"
#include "netdiff/errors.hpp"
#include "netdiff/serialize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace netdiff {

std::string to_string(PgMethod m) { return m == PgMethod::exact ? "exact" : "truncated-sum"; }

PgMethod parse_pg_method(const std::string& name) {
  if (name == "exact") return PgMethod::exact;
  if (name == "truncated-sum" || name == "truncated_sum") return PgMethod::truncated_sum;
  throw ContractError("unknown Polya-gamma method '" + name + "' (expected exact or truncated-sum)");
}

void to_json(json& j, const Hyperparameters& h) {
  j = json{{"h_max", h.h_max},   {"r_max", h.r_max},   {"beta_a", h.beta_a},       {"beta_b", h.beta_b},
           {"z_mean", h.z_mean}, {"z_var", h.z_var},   {"mig_a1", h.mig_a1},       {"mig_a2", h.mig_a2},
           {"prior_h1", h.prior_h1}, {"dirichlet_conc", h.concentration()}};
}

void from_json(const json& j, Hyperparameters& h) {
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("h_max", h.h_max);
  get("r_max", h.r_max);
  get("beta_a", h.beta_a);
  get("beta_b", h.beta_b);
  get("z_mean", h.z_mean);
  get("z_var", h.z_var);
  get("mig_a1", h.mig_a1);
  get("mig_a2", h.mig_a2);
  get("prior_h1", h.prior_h1);
  if (j.contains("dirichlet_conc") && !j.at("dirichlet_conc").is_null()) {
    h.dirichlet_conc = j.at("dirichlet_conc").get<double>();
  }
}

void to_json(json& j, const GibbsConfig& c) {
  j = json{{"n_iter", c.n_iter},   {"burn_in", c.burn_in},
           {"thin", c.thin},       {"seed", c.seed},
           {"n_chains", c.n_chains}, {"snapshot_thin", c.snapshot_thin},
           {"pg_method", to_string(c.pg_method)}, {"predictive", c.predictive}};
}

void from_json(const json& j, GibbsConfig& c) {
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("n_iter", c.n_iter);
  get("burn_in", c.burn_in);
  get("thin", c.thin);
  get("seed", c.seed);
  get("n_chains", c.n_chains);
  get("snapshot_thin", c.snapshot_thin);
  get("predictive", c.predictive);
  if (j.contains("pg_method")) c.pg_method = parse_pg_method(j.at("pg_method").get<std::string>());
}

double PosteriorChain::h1_fraction() const {
  if (t.empty()) return 0.0;
  return static_cast<double>(std::accumulate(t.begin(), t.end(), 0)) / static_cast<double>(t.size());
}

namespace {

Eigen::MatrixXd vstack(std::span<const PosteriorChain> chains, Eigen::MatrixXd PosteriorChain::*field) {
  Eigen::Index rows = 0;
  Eigen::Index cols = -1;
  for (const auto& c : chains) {
    const auto& m = c.*field;
    if (m.size() == 0) continue;
    if (cols >= 0 && m.cols() != cols) throw ContractError("concatenate: chains have different dimensions");
    cols = m.cols();
    rows += m.rows();
  }
  Eigen::MatrixXd out(rows, std::max<Eigen::Index>(cols, 0));
  Eigen::Index r = 0;
  for (const auto& c : chains) {
    const auto& m = c.*field;
    if (m.size() == 0) continue;
    out.middleRows(r, m.rows()) = m;
    r += m.rows();
  }
  return out;
}

Eigen::MatrixXd column(const std::vector<double>& x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

std::vector<std::string> numbered(const std::string& prefix, Eigen::Index count) {
  std::vector<std::string> names;
  for (Eigen::Index k = 1; k <= count; ++k) names.push_back(prefix + std::to_string(k));
  return names;
}

std::vector<std::string> edge_names(int v) {
  const auto& index = *EdgeIndex::of(v);
  std::vector<std::string> names;
  names.reserve(index.size());
  for (std::size_t l = 0; l < index.size(); ++l) {
    auto [row, col] = index.pair(l);
    names.push_back("e" + std::to_string(row + 1) + "_" + std::to_string(col + 1));
  }
  return names;
}

}  // namespace

PosteriorChain concatenate(std::span<const PosteriorChain> chains) {
  if (chains.empty()) throw ContractError("concatenate: no chains");
  PosteriorChain out;
  const auto& first = chains.front();
  out.v = first.v;
  out.h = first.h;
  out.chain_index = first.chain_index;
  out.hyper = first.hyper;
  out.config = first.config;
  for (const auto& c : chains) {
    if (c.v != out.v || c.h != out.h) throw ContractError("concatenate: chains have different dimensions");
    out.t.insert(out.t.end(), c.t.begin(), c.t.end());
    out.p_y1.insert(out.p_y1.end(), c.p_y1.begin(), c.p_y1.end());
    out.snapshots.insert(out.snapshots.end(), c.snapshots.begin(), c.snapshots.end());
  }
  out.nu1 = vstack(chains, &PosteriorChain::nu1);
  out.nu2 = vstack(chains, &PosteriorChain::nu2);
  out.pibar1 = vstack(chains, &PosteriorChain::pibar1);
  out.pibar2 = vstack(chains, &PosteriorChain::pibar2);
  out.rho = vstack(chains, &PosteriorChain::rho);
  out.occupancy = vstack(chains, &PosteriorChain::occupancy);
  bool predictive = std::all_of(chains.begin(), chains.end(), [](const PosteriorChain& c) {
    return c.predictive[0].size() > 0 || c.size() == 0;
  });
  if (predictive) {
    for (int y = 0; y < 2; ++y) {
      Eigen::Index rows = 0;
      for (const auto& c : chains) rows += c.predictive[y].rows();
      out.predictive[y].resize(rows, static_cast<Eigen::Index>(kPredictiveColumns.size()));
      Eigen::Index r = 0;
      for (const auto& c : chains) {
        if (c.predictive[y].rows() == 0) continue;
        out.predictive[y].middleRows(r, c.predictive[y].rows()) = c.predictive[y];
        r += c.predictive[y].rows();
      }
    }
  }
  return out;
}

void save_chain(const PosteriorChain& chain, const fs::path& dir) {
  fs::create_directories(dir);
  json meta{{"v", chain.v},
            {"h", chain.h},
            {"chain_index", chain.chain_index},
            {"stored", chain.size()},
            {"h1_fraction", chain.h1_fraction()},
            {"hyperparameters", chain.hyper},
            {"config", chain.config},
            {"snapshots", chain.snapshots.size()}};
  std::ofstream(dir / "metadata.json") << meta.dump(2) << '\n';

  std::vector<double> t(chain.t.begin(), chain.t.end());
  csv::write_matrix(dir / "t.csv", column(t), {"t"});
  csv::write_matrix(dir / "p_y1.csv", column(chain.p_y1), {"p_y1"});
  csv::write_matrix(dir / "nu1.csv", chain.nu1, numbered("h", chain.h));
  csv::write_matrix(dir / "nu2.csv", chain.nu2, numbered("h", chain.h));
  csv::write_matrix(dir / "occupancy.csv", chain.occupancy, numbered("h", chain.h));
  const auto edges = edge_names(chain.v);
  csv::write_matrix(dir / "pibar1.csv", chain.pibar1, edges);
  csv::write_matrix(dir / "pibar2.csv", chain.pibar2, edges);
  csv::write_matrix(dir / "rho.csv", chain.rho, edges);

  const std::vector<std::string> pred_header(kPredictiveColumns.begin(), kPredictiveColumns.end());
  for (int y = 0; y < 2; ++y) {
    if (chain.predictive[y].size() == 0) continue;
    csv::write_matrix(dir / ("predictive_group" + std::to_string(y + 1) + ".csv"), chain.predictive[y], pred_header);
  }

  if (!chain.snapshots.empty()) {
    const auto length = static_cast<Eigen::Index>(pair_count(chain.v));
    const auto k = static_cast<Eigen::Index>(chain.snapshots.size());
    Eigen::MatrixXd params(k, 1 + 2 * chain.h);
    Eigen::MatrixXd pi(k, length * chain.h);
    for (Eigen::Index s = 0; s < k; ++s) {
      const auto& snap = chain.snapshots[s];
      params(s, 0) = snap.p_y1;
      params.row(s).segment(1, chain.h) = snap.nu1.transpose();
      params.row(s).segment(1 + chain.h, chain.h) = snap.nu2.transpose();
      pi.row(s) = Eigen::Map<const Eigen::RowVectorXd>(snap.pi.data(), snap.pi.size());
    }
    auto header = numbered("nu1_", chain.h);
    auto second = numbered("nu2_", chain.h);
    header.insert(header.begin(), "p_y1");
    header.insert(header.end(), second.begin(), second.end());
    csv::write_matrix(dir / "snapshot_params.csv", params, header);
    csv::write_matrix(dir / "snapshot_pi.csv", pi);
  }
}

PosteriorChain load_chain(const fs::path& dir) {
  const auto meta_path = dir / "metadata.json";
  std::ifstream in(meta_path);
  if (!in) throw LoadError("chain directory " + dir.string() + " has no metadata.json");
  json meta;
  try {
    in >> meta;
  } catch (const json::exception& e) {
    throw LoadError(meta_path.string() + ": " + e.what());
  }

  PosteriorChain chain;
  chain.v = meta.at("v").get<int>();
  chain.h = meta.at("h").get<int>();
  chain.chain_index = meta.value("chain_index", 0);
  chain.hyper = meta.at("hyperparameters").get<Hyperparameters>();
  chain.config = meta.at("config").get<GibbsConfig>();

  const auto length = static_cast<Eigen::Index>(pair_count(chain.v));
  auto read = [&](const char* name, Eigen::Index cols) {
    Eigen::MatrixXd m = csv::read_matrix(dir / name);
    if (m.rows() > 0 && m.cols() != cols) {
      throw LoadError((dir / name).string() + ": expected " + std::to_string(cols) + " columns, found " +
                      std::to_string(m.cols()));
    }
    return m;
  };
  const Eigen::MatrixXd t = read("t.csv", 1);
  const Eigen::MatrixXd p = read("p_y1.csv", 1);
  chain.t.resize(t.rows());
  for (Eigen::Index k = 0; k < t.rows(); ++k) chain.t[k] = static_cast<int>(t(k, 0));
  chain.p_y1.assign(p.data(), p.data() + p.size());
  chain.nu1 = read("nu1.csv", chain.h);
  chain.nu2 = read("nu2.csv", chain.h);
  chain.occupancy = read("occupancy.csv", chain.h);
  chain.pibar1 = read("pibar1.csv", length);
  chain.pibar2 = read("pibar2.csv", length);
  chain.rho = read("rho.csv", length);
  const auto n = static_cast<Eigen::Index>(chain.t.size());
  for (const Eigen::MatrixXd* m : std::initializer_list<const Eigen::MatrixXd*>{&p, &chain.nu1, &chain.nu2, &chain.occupancy, &chain.pibar1, &chain.pibar2, &chain.rho}) {
    if (m->rows() != n) throw LoadError("chain directory " + dir.string() + ": functionals have different lengths");
  }
  for (int y = 0; y < 2; ++y) {
    const auto path = dir / ("predictive_group" + std::to_string(y + 1) + ".csv");
    if (fs::exists(path)) chain.predictive[y] = read(path.filename().c_str(), kPredictiveColumns.size());
  }
  if (fs::exists(dir / "snapshot_params.csv")) {
    const Eigen::MatrixXd params = read("snapshot_params.csv", 1 + 2 * chain.h);
    const Eigen::MatrixXd pi = read("snapshot_pi.csv", length * chain.h);
    if (params.rows() != pi.rows()) throw LoadError("chain directory " + dir.string() + ": snapshot files disagree");
    for (Eigen::Index s = 0; s < params.rows(); ++s) {
      ParameterSnapshot snap;
      snap.p_y1 = params(s, 0);
      snap.nu1 = params.row(s).segment(1, chain.h).transpose();
      snap.nu2 = params.row(s).segment(1 + chain.h, chain.h).transpose();
      snap.pi = Eigen::Map<const Eigen::MatrixXd>(pi.row(s).eval().data(), length, chain.h);
      chain.snapshots.push_back(std::move(snap));
    }
  }
  return chain;
}

std::vector<PosteriorChain> load_chains(const fs::path& dir) {
  if (fs::exists(dir / "metadata.json")) return {load_chain(dir)};
  std::vector<std::pair<int, fs::path>> found;
  if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      const auto name = entry.path().filename().string();
      if (entry.is_directory() && name.rfind("chain_", 0) == 0) {
        try {
          found.emplace_back(std::stoi(name.substr(6)), entry.path());
        } catch (const std::exception&) {
        }
      }
    }
  }
  if (found.empty()) throw LoadError("no posterior chain found in " + dir.string());
  std::sort(found.begin(), found.end());
  std::vector<PosteriorChain> chains;
  for (const auto& [k, path] : found) chains.push_back(load_chain(path));
  return chains;
}

}  // namespace netdiff
