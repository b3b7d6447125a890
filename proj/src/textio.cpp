#include "locpred/textio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "locpred/errors.hpp"

namespace locpred {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_matrix_rows(std::ostream& out, const Eigen::MatrixXd& m) {
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix_rows(std::istream& in, int rows, int cols,
                                 int& line) {
  Eigen::MatrixXd m(rows, cols);
  std::string text;
  for (int r = 0; r < rows; ++r) {
    if (!std::getline(in, text))
      throw ParseError("unexpected end of input in matrix row", line);
    ++line;
    std::istringstream row(text);
    for (int c = 0; c < cols; ++c) {
      if (!(row >> m(r, c)))
        throw ParseError("expected " + std::to_string(cols) +
                             " numeric entries in matrix row",
                         line - 1);
    }
  }
  return m;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("rename failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace locpred
