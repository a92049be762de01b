#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "netdiff/edge_index.hpp"

namespace netdiff {

using Adjacency = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

/// Lower-triangular binary encoding of an undirected, hollow network.
class EdgeVector {
 public:
  EdgeVector() = default;
  /// Throws FormatError on a length that does not match `v` or a non-binary entry.
  EdgeVector(int v, std::vector<std::uint8_t> bits);

  static EdgeVector empty(int v) { return EdgeVector(v, std::vector<std::uint8_t>(pair_count(v), 0)); }

  int nodes() const { return v_; }
  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t l) const { return bits_[l] != 0; }
  std::span<const std::uint8_t> bits() const { return bits_; }
  std::size_t edge_total() const;

  bool operator==(const EdgeVector&) const = default;

 private:
  int v_ = 0;
  std::vector<std::uint8_t> bits_;
};

EdgeVector vectorize(const Adjacency& adjacency);
Adjacency devectorize(const EdgeVector& edges);
/// Length-checked overload: `bits` must have a triangular length.
Adjacency devectorize(std::span<const std::uint8_t> bits);

struct NetworkDataset {
  int v = 0;
  std::vector<EdgeVector> networks;
  std::vector<int> groups;                // labels in {1, 2}
  std::optional<std::vector<int>> blocks;  // node -> block id

  std::size_t size() const { return networks.size(); }
  std::size_t group_count(int y) const;
  /// Throws FormatError describing the first violated invariant.
  void validate() const;
};

struct SummaryVector {
  double density = 0.0;
  double transitivity = 0.0;
  double avg_path_length = 0.0;
  std::optional<double> assortativity;  // empty when undefined
};

/// Density, global transitivity, mean shortest path (unreachable pairs take the
/// largest finite distance in the graph) and categorical block assortativity.
/// `blocks` may be empty, in which case assortativity is left undefined.
SummaryVector summary_stats(const EdgeVector& edges, std::span<const int> blocks = {});

/// Number of edges joining nodes of different blocks.
std::size_t between_block_edges(const EdgeVector& edges, std::span<const int> blocks);

}  // namespace netdiff
