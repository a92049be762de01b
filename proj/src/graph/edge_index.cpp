#include "netdiff/edge_index.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "netdiff/errors.hpp"

namespace netdiff {

EdgeIndex::EdgeIndex(int v) : v_(v) {
  if (v < 2) throw ContractError("EdgeIndex: need at least 2 nodes, got " + std::to_string(v));
  pairs_.reserve(pair_count(v));
  for (int col = 0; col < v; ++col) {
    for (int row = col + 1; row < v; ++row) pairs_.push_back({row, col});
  }
  incidence_.resize(static_cast<std::size_t>(v) * (v - 1));
  std::vector<int> fill(v, 0);
  for (std::size_t l = 0; l < pairs_.size(); ++l) {
    auto [row, col] = pairs_[l];
    incidence_[row * (v - 1) + fill[row]++] = {l, col};
    incidence_[col * (v - 1) + fill[col]++] = {l, row};
  }
}

std::shared_ptr<const EdgeIndex> EdgeIndex::of(int v) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const EdgeIndex>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[v];
  if (!slot) slot = std::make_shared<const EdgeIndex>(v);
  return slot;
}

std::size_t EdgeIndex::index(int a, int b) const {
  if (a == b || a < 0 || b < 0 || a >= v_ || b >= v_) {
    throw ContractError("EdgeIndex::index: invalid pair");
  }
  if (a < b) std::swap(a, b);
  const auto col = static_cast<std::size_t>(b);
  return col * v_ - col * (col + 1) / 2 + static_cast<std::size_t>(a - b - 1);
}

int nodes_for_length(std::size_t length) {
  // V = (1 + sqrt(1 + 8 L)) / 2
  const auto guess = static_cast<int>(std::llround((1.0 + std::sqrt(1.0 + 8.0 * double(length))) / 2.0));
  for (int v = std::max(2, guess - 1); v <= guess + 1; ++v) {
    if (pair_count(v) == length) return v;
  }
  return -1;
}

}  // namespace netdiff
