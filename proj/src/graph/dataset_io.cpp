#include "netdiff/dataset_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "netdiff/csv.hpp"
#include "netdiff/errors.hpp"

namespace netdiff {

namespace fs = std::filesystem;

NetworkFormat parse_network_format(const std::string& name) {
  if (name == "csv") return NetworkFormat::csv;
  if (name == "adjacency-dir" || name == "adjacency_dir") return NetworkFormat::adjacency_dir;
  throw ContractError("unknown network format '" + name + "' (expected csv or adjacency-dir)");
}

namespace {

std::vector<std::vector<std::string>> data_rows(const fs::path& path) {
  auto rows = csv::read(path);
  if (!rows.empty() && !csv::numeric_row(rows.front())) rows.erase(rows.begin());  // header
  return rows;
}

int parse_int(const std::string& field, const fs::path& path, std::size_t row) {
  try {
    std::size_t used = 0;
    const int value = std::stoi(field, &used);
    if (used == field.size()) return value;
  } catch (const std::exception&) {
  }
  throw LoadError(path.string() + ": row " + std::to_string(row) + ": '" + field + "' is not an integer");
}

std::vector<EdgeVector> load_csv_networks(const fs::path& path) {
  const auto rows = data_rows(path);
  if (rows.empty()) throw LoadError(path.string() + ": no networks");
  const auto width = rows.front().size();
  const int v = nodes_for_length(width);
  if (v < 0) {
    throw LoadError(path.string() + ": row 1 has " + std::to_string(width) +
                    " columns, which is not V(V-1)/2 for any V >= 2");
  }
  std::vector<EdgeVector> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != width) {
      throw LoadError(path.string() + ": row " + std::to_string(i + 1) + " has " +
                      std::to_string(rows[i].size()) + " columns, expected " + std::to_string(width));
    }
    std::vector<std::uint8_t> bits(width);
    for (std::size_t j = 0; j < width; ++j) {
      const int value = parse_int(rows[i][j], path, i + 1);
      if (value != 0 && value != 1) {
        throw LoadError(path.string() + ": row " + std::to_string(i + 1) + ", column " +
                        std::to_string(j + 1) + ": entry " + std::to_string(value) + " is not binary");
      }
      bits[j] = static_cast<std::uint8_t>(value);
    }
    out.emplace_back(v, std::move(bits));
  }
  return out;
}

EdgeVector load_adjacency_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  std::vector<std::vector<int>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::vector<int> row;
    std::string token;
    while (ss >> token) row.push_back(parse_int(token, path, rows.size() + 1));
    if (!row.empty()) rows.push_back(std::move(row));
  }
  const auto v = rows.size();
  Adjacency a(v, v);
  for (std::size_t i = 0; i < v; ++i) {
    if (rows[i].size() != v) {
      throw LoadError(path.string() + ": row " + std::to_string(i + 1) + " has " +
                      std::to_string(rows[i].size()) + " entries, expected " + std::to_string(v));
    }
    for (std::size_t j = 0; j < v; ++j) a(i, j) = rows[i][j];
  }
  try {
    return vectorize(a);
  } catch (const FormatError& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

std::vector<EdgeVector> load_adjacency_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw LoadError(dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw LoadError(dir.string() + ": no adjacency files");
  std::vector<EdgeVector> out;
  for (const auto& f : files) out.push_back(load_adjacency_file(f));
  return out;
}

}  // namespace

std::vector<EdgeVector> load_networks(const fs::path& networks, NetworkFormat format) {
  auto out = format == NetworkFormat::csv ? load_csv_networks(networks) : load_adjacency_dir(networks);
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].nodes() != out[0].nodes()) {
      throw LoadError(networks.string() + ": network " + std::to_string(i + 1) + " has v=" +
                      std::to_string(out[i].nodes()) + " but network 1 has v=" +
                      std::to_string(out[0].nodes()));
    }
  }
  return out;
}

NetworkDataset load_dataset(const fs::path& networks, const fs::path& groups, NetworkFormat format,
                            const std::optional<fs::path>& blocks) {
  NetworkDataset data;
  data.networks = load_networks(networks, format);
  data.v = data.networks.front().nodes();

  const auto label_rows = data_rows(groups);
  for (std::size_t i = 0; i < label_rows.size(); ++i) {
    if (label_rows[i].size() != 1) {
      throw LoadError(groups.string() + ": row " + std::to_string(i + 1) + " must have exactly one column");
    }
    const int y = parse_int(label_rows[i][0], groups, i + 1);
    if (y != 1 && y != 2) {
      throw LoadError(groups.string() + ": row " + std::to_string(i + 1) + ": group label " +
                      std::to_string(y) + " is not 1 or 2");
    }
    data.groups.push_back(y);
  }
  if (data.groups.size() != data.networks.size()) {
    throw LoadError("dataset: " + std::to_string(data.networks.size()) + " networks but " +
                    std::to_string(data.groups.size()) + " group labels");
  }

  if (blocks) {
    const auto block_rows = data_rows(*blocks);
    std::vector<int> map;
    for (std::size_t i = 0; i < block_rows.size(); ++i) {
      if (block_rows[i].size() != 1) {
        throw LoadError(blocks->string() + ": row " + std::to_string(i + 1) + " must have exactly one column");
      }
      map.push_back(parse_int(block_rows[i][0], *blocks, i + 1));
    }
    if (map.size() != static_cast<std::size_t>(data.v)) {
      throw LoadError(blocks->string() + ": " + std::to_string(map.size()) + " block ids for v=" +
                      std::to_string(data.v) + " nodes");
    }
    data.blocks = std::move(map);
  }
  data.validate();
  return data;
}

void save_dataset(const NetworkDataset& data, const fs::path& networks, const fs::path& groups,
                  const std::optional<fs::path>& blocks) {
  data.validate();
  {
    std::ofstream out(networks);
    if (!out) throw std::runtime_error("cannot write " + networks.string());
    for (const auto& e : data.networks) {
      for (std::size_t l = 0; l < e.size(); ++l) out << (l ? "," : "") << (e[l] ? '1' : '0');
      out << '\n';
    }
  }
  {
    std::ofstream out(groups);
    if (!out) throw std::runtime_error("cannot write " + groups.string());
    for (int y : data.groups) out << y << '\n';
  }
  if (blocks && data.blocks) {
    std::ofstream out(*blocks);
    if (!out) throw std::runtime_error("cannot write " + blocks->string());
    for (int b : *data.blocks) out << b << '\n';
  }
}

}  // namespace netdiff
