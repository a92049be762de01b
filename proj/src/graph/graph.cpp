#include "netdiff/graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <string>

#include "netdiff/errors.hpp"

namespace netdiff {

EdgeVector::EdgeVector(int v, std::vector<std::uint8_t> bits) : v_(v), bits_(std::move(bits)) {
  if (v < 2) throw FormatError("EdgeVector: node count must be >= 2");
  if (bits_.size() != pair_count(v)) {
    throw FormatError("EdgeVector: length " + std::to_string(bits_.size()) + " does not match v=" +
                      std::to_string(v) + " (expected " + std::to_string(pair_count(v)) + ")");
  }
  for (auto b : bits_) {
    if (b > 1) throw FormatError("EdgeVector: entries must be 0 or 1");
  }
}

std::size_t EdgeVector::edge_total() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

EdgeVector vectorize(const Adjacency& a) {
  const auto v = static_cast<int>(a.rows());
  if (a.cols() != a.rows()) throw FormatError("vectorize: adjacency matrix must be square");
  for (int i = 0; i < v; ++i) {
    if (a(i, i) != 0) throw FormatError("vectorize: nonzero diagonal at node " + std::to_string(i + 1));
    for (int j = 0; j < i; ++j) {
      if (a(i, j) != a(j, i)) throw FormatError("vectorize: matrix is not symmetric");
      if (a(i, j) != 0 && a(i, j) != 1) throw FormatError("vectorize: matrix is not binary");
    }
  }
  const auto& index = *EdgeIndex::of(v);
  std::vector<std::uint8_t> bits(index.size());
  for (std::size_t l = 0; l < index.size(); ++l) {
    auto [row, col] = index.pair(l);
    bits[l] = static_cast<std::uint8_t>(a(row, col));
  }
  return EdgeVector(v, std::move(bits));
}

Adjacency devectorize(const EdgeVector& e) {
  const auto& index = *EdgeIndex::of(e.nodes());
  Adjacency a = Adjacency::Zero(e.nodes(), e.nodes());
  for (std::size_t l = 0; l < index.size(); ++l) {
    if (!e[l]) continue;
    auto [row, col] = index.pair(l);
    a(row, col) = a(col, row) = 1;
  }
  return a;
}

Adjacency devectorize(std::span<const std::uint8_t> bits) {
  const int v = nodes_for_length(bits.size());
  if (v < 0) throw FormatError("devectorize: length " + std::to_string(bits.size()) + " is not V(V-1)/2");
  return devectorize(EdgeVector(v, {bits.begin(), bits.end()}));
}

std::size_t NetworkDataset::group_count(int y) const {
  return static_cast<std::size_t>(std::count(groups.begin(), groups.end(), y));
}

void NetworkDataset::validate() const {
  if (v < 2) throw FormatError("dataset: node count must be >= 2");
  if (networks.size() != groups.size()) {
    throw FormatError("dataset: " + std::to_string(networks.size()) + " networks but " +
                      std::to_string(groups.size()) + " group labels");
  }
  for (std::size_t i = 0; i < networks.size(); ++i) {
    if (networks[i].nodes() != v) {
      throw FormatError("dataset: network " + std::to_string(i + 1) + " has v=" +
                        std::to_string(networks[i].nodes()) + ", expected " + std::to_string(v));
    }
    if (groups[i] != 1 && groups[i] != 2) {
      throw FormatError("dataset: group label " + std::to_string(groups[i]) + " at row " +
                        std::to_string(i + 1) + " is not 1 or 2");
    }
  }
  if (blocks && blocks->size() != static_cast<std::size_t>(v)) {
    throw FormatError("dataset: block map has " + std::to_string(blocks->size()) + " entries for " +
                      std::to_string(v) + " nodes");
  }
}

namespace {

std::vector<std::vector<int>> neighbours(const EdgeVector& e) {
  const auto& index = *EdgeIndex::of(e.nodes());
  std::vector<std::vector<int>> adj(e.nodes());
  for (std::size_t l = 0; l < index.size(); ++l) {
    if (!e[l]) continue;
    auto [row, col] = index.pair(l);
    adj[row].push_back(col);
    adj[col].push_back(row);
  }
  return adj;
}

double global_transitivity(const EdgeVector& e, const std::vector<std::vector<int>>& adj) {
  const auto& index = *EdgeIndex::of(e.nodes());
  // closed triples counted once per centre node: 3 x triangles
  double closed = 0.0;
  double triples = 0.0;
  for (int node = 0; node < e.nodes(); ++node) {
    const auto& nb = adj[node];
    const double k = static_cast<double>(nb.size());
    triples += k * (k - 1.0) / 2.0;
    for (std::size_t i = 0; i < nb.size(); ++i) {
      for (std::size_t j = i + 1; j < nb.size(); ++j) {
        if (e[index.index(nb[i], nb[j])]) closed += 1.0;
      }
    }
  }
  return triples > 0.0 ? closed / triples : 0.0;
}

double mean_path_length(const std::vector<std::vector<int>>& adj) {
  const int v = static_cast<int>(adj.size());
  long long finite_sum = 0;
  long long unreachable = 0;
  int longest = 0;
  std::vector<int> dist(v);
  std::queue<int> frontier;
  for (int source = 0; source < v; ++source) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[source] = 0;
    frontier.push(source);
    while (!frontier.empty()) {
      const int node = frontier.front();
      frontier.pop();
      for (int next : adj[node]) {
        if (dist[next] < 0) {
          dist[next] = dist[node] + 1;
          frontier.push(next);
        }
      }
    }
    for (int target = source + 1; target < v; ++target) {
      if (dist[target] < 0) {
        ++unreachable;
      } else {
        finite_sum += dist[target];
        longest = std::max(longest, dist[target]);
      }
    }
  }
  const double pairs = static_cast<double>(v) * (v - 1) / 2.0;
  return (static_cast<double>(finite_sum) + static_cast<double>(unreachable) * longest) / pairs;
}

std::optional<double> block_assortativity(const EdgeVector& e, std::span<const int> blocks) {
  if (blocks.empty() || e.edge_total() == 0) return std::nullopt;
  std::map<int, int> slot;
  for (int b : blocks) slot.emplace(b, static_cast<int>(slot.size()));
  const auto k = slot.size();
  Eigen::MatrixXd mixing = Eigen::MatrixXd::Zero(k, k);
  const auto& index = *EdgeIndex::of(e.nodes());
  for (std::size_t l = 0; l < index.size(); ++l) {
    if (!e[l]) continue;
    auto [row, col] = index.pair(l);
    const int a = slot[blocks[row]];
    const int b = slot[blocks[col]];
    mixing(a, b) += 1.0;
    mixing(b, a) += 1.0;
  }
  mixing /= mixing.sum();
  const double trace = mixing.trace();
  const double ab = mixing.rowwise().sum().squaredNorm();
  if (1.0 - ab <= 1e-15) return std::nullopt;
  return (trace - ab) / (1.0 - ab);
}

}  // namespace

SummaryVector summary_stats(const EdgeVector& e, std::span<const int> blocks) {
  if (!blocks.empty() && blocks.size() != static_cast<std::size_t>(e.nodes())) {
    throw ContractError("summary_stats: block map size does not match node count");
  }
  SummaryVector s;
  s.density = static_cast<double>(e.edge_total()) / static_cast<double>(e.size());
  const auto adj = neighbours(e);
  s.transitivity = global_transitivity(e, adj);
  s.avg_path_length = mean_path_length(adj);
  s.assortativity = block_assortativity(e, blocks);
  return s;
}

std::size_t between_block_edges(const EdgeVector& e, std::span<const int> blocks) {
  if (blocks.size() != static_cast<std::size_t>(e.nodes())) {
    throw ContractError("between_block_edges: block map size does not match node count");
  }
  const auto& index = *EdgeIndex::of(e.nodes());
  std::size_t count = 0;
  for (std::size_t l = 0; l < index.size(); ++l) {
    auto [row, col] = index.pair(l);
    if (e[l] && blocks[row] != blocks[col]) ++count;
  }
  return count;
}

}  // namespace netdiff
