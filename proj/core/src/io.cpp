#include "qsa/io.hpp"

#include "qsa/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace qsa {

std::string format_g17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return std::string(buf);
}

void write_matrix_txt(std::ostream& out, const Eigen::MatrixXd& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << format_g17(m(r, c));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix_txt(std::istream& in) {
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows <= 0 || cols <= 0)
    throw ParseError("matrix dump: bad header");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      if (!(in >> m(r, c))) throw ParseError("matrix dump: truncated data");
  return m;
}

void write_matrix_file(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  write_matrix_txt(out, m);
}

}  // namespace qsa
