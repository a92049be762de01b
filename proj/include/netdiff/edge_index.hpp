#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace netdiff {

/// Number of node pairs in an undirected graph on `v` nodes.
constexpr std::size_t pair_count(int v) {
  return v < 2 ? 0 : static_cast<std::size_t>(v) * static_cast<std::size_t>(v - 1) / 2;
}

struct NodePair {
  int row;  // larger node index (0-based)
  int col;  // smaller node index (0-based)
};

struct Incidence {
  std::size_t edge;
  int other;
};

/// Mapping between edge index l and node pair (v, u), v > u, in column-major
/// lower-triangular order: (1,0), (2,0), ..., (V-1,0), (2,1), ...
///
/// Instances are immutable; `EdgeIndex::of(v)` hands out a shared cached copy.
class EdgeIndex {
 public:
  explicit EdgeIndex(int v);

  static std::shared_ptr<const EdgeIndex> of(int v);

  int nodes() const { return v_; }
  std::size_t size() const { return pairs_.size(); }

  NodePair pair(std::size_t l) const { return pairs_[l]; }
  std::size_t index(int a, int b) const;

  /// Edges touching `node`, with the opposite endpoint.
  std::span<const Incidence> incident(int node) const {
    return {incidence_.data() + node * (v_ - 1), static_cast<std::size_t>(v_ - 1)};
  }

 private:
  int v_;
  std::vector<NodePair> pairs_;
  std::vector<Incidence> incidence_;
};

/// Inverse of pair_count; returns -1 when `length` is not a triangular number
/// V(V-1)/2 with V >= 2.
int nodes_for_length(std::size_t length);

}  // namespace netdiff
