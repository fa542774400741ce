#include "biobench/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace biobench::io {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

namespace {

bool parse_double(const std::string& s, double* out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, *out);
  if (ec != std::errc()) return false;
  while (ptr < end && (*ptr == ' ' || *ptr == '\t' || *ptr == '\r')) ++ptr;
  return ptr == end;
}

}  // namespace

Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open CSV: " + path.string());
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    std::vector<double> row;
    row.reserve(fields.size());
    bool numeric = true;
    for (const auto& f : fields) {
      double v = 0.0;
      if (!parse_double(f, &v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;  // header row
      }
      throw std::runtime_error("non-numeric CSV row in " + path.string());
    }
    first = false;
    if (!rows.empty() && rows.front().size() != row.size()) {
      throw std::runtime_error("ragged CSV rows in " + path.string());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw std::runtime_error("empty CSV: " + path.string());
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

void write_csv_matrix(const std::filesystem::path& path,
                      const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open CSV for writing: " + path.string());
  }
  out.precision(17);
  if (!header.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      out << header[i] << (i + 1 < header.size() ? "," : "\n");
    }
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << m(i, j) << (j + 1 < m.cols() ? "," : "\n");
    }
  }
  if (!out) {
    throw std::runtime_error("short CSV write: " + path.string());
  }
}

}  // namespace biobench::io
