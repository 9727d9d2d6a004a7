#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>

namespace qsa {

// Fixed-format decimal with 17 significant digits; locale independent.
// All CSV and dump emission goes through this so that reruns with the same
// seed produce byte-identical files.
std::string format_g17(double value);

// Plain-text matrix dump: "rows cols" then one row per line, row-major,
// 17 significant digits.
void write_matrix_txt(std::ostream& out, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_txt(std::istream& in);

void write_matrix_file(const std::string& path, const Eigen::MatrixXd& m);

}  // namespace qsa
