#pragma once

#include <filesystem>
#include <optional>

#include "netdiff/graph.hpp"

namespace netdiff {

enum class NetworkFormat {
  csv,            // one network per row, v(v-1)/2 columns
  adjacency_dir,  // directory of whitespace-delimited v x v matrices
};

NetworkFormat parse_network_format(const std::string& name);

/// Reads and validates a dataset. Errors are LoadError with the offending row.
NetworkDataset load_dataset(const std::filesystem::path& networks, const std::filesystem::path& groups,
                            NetworkFormat format = NetworkFormat::csv,
                            const std::optional<std::filesystem::path>& blocks = std::nullopt);

/// Networks only (no labels), e.g. for prediction.
std::vector<EdgeVector> load_networks(const std::filesystem::path& networks,
                                      NetworkFormat format = NetworkFormat::csv);

/// Writes networks.csv / groups.csv (and blocks.csv when present) in the canonical layout.
void save_dataset(const NetworkDataset& data, const std::filesystem::path& networks,
                  const std::filesystem::path& groups,
                  const std::optional<std::filesystem::path>& blocks = std::nullopt);

}  // namespace netdiff
