#include "netdiff/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "netdiff/errors.hpp"

namespace netdiff::csv {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\"");
  return s.substr(first, last - first + 1);
}

bool parse_double(const std::string& field, double& out) {
  if (field == "NA" || field == "nan" || field == "NaN") {
    out = std::nan("");
    return true;
  }
  char* end = nullptr;
  out = std::strtod(field.c_str(), &end);
  return !field.empty() && end == field.c_str() + field.size();
}

}  // namespace

std::vector<std::vector<std::string>> read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) row.push_back(trim(field));
    if (!line.empty() && line.back() == ',') row.emplace_back();
    rows.push_back(std::move(row));
  }
  return rows;
}

bool numeric_row(const std::vector<std::string>& row) {
  double x;
  for (const auto& f : row) {
    if (!parse_double(f, x)) return false;
  }
  return true;
}

std::string format(double x) {
  if (std::isnan(x)) return "NA";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                  const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
    out << '\n';
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format(m(i, j));
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
  auto rows = read(path);
  if (!rows.empty() && !numeric_row(rows.front())) rows.erase(rows.begin());
  if (rows.empty()) return {};
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) {
      throw LoadError(path.string() + ": ragged row " + std::to_string(i + 1));
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      if (!parse_double(rows[i][j], m(i, j))) {
        throw LoadError(path.string() + ": non-numeric field at row " + std::to_string(i + 1));
      }
    }
  }
  return m;
}

}  // namespace netdiff::csv
