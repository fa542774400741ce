#ifndef BIOBENCH_CSV_HPP
#define BIOBENCH_CSV_HPP

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

namespace biobench::io {

/// Reads a numeric CSV (one vector per row). A leading header row is
/// detected and skipped when any of its fields is not a number.
Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path);

/// Writes a numeric CSV; pass column names to emit a header row.
void write_csv_matrix(const std::filesystem::path& path,
                      const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header = {});

/// Splits one CSV line on commas (no quoting; fields are numbers, enum
/// tokens, or plain paths).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace biobench::io

#endif  // BIOBENCH_CSV_HPP
