#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace netdiff::csv {

/// Rows of comma-separated fields; blank lines are skipped, fields are trimmed.
std::vector<std::vector<std::string>> read(const std::filesystem::path& path);

/// True when every field of `row` parses as a number.
bool numeric_row(const std::vector<std::string>& row);

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                  const std::vector<std::string>& header = {});
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

/// Shortest round-trip decimal representation.
std::string format(double x);

}  // namespace netdiff::csv
