#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>

namespace locpred {

// Shortest round-trip-exact decimal form (17 significant digits).
std::string format_double(double x);

void write_matrix_rows(std::ostream& out, const Eigen::MatrixXd& m);

// Reads `rows` whitespace-separated lines of `cols` doubles each.
// `line` is advanced past consumed lines and used in error messages.
Eigen::MatrixXd read_matrix_rows(std::istream& in, int rows, int cols, int& line);

// Writes content to path atomically (temp file + rename).
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace locpred
