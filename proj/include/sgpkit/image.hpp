#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>

namespace sgp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Row-major pixel grid stored as a flat vector; (row i, col j) -> i*w + j.
struct ImageShape {
  int h = 0;
  int w = 0;
  int size() const { return h * w; }
  int at(int i, int j) const { return i * w + j; }
};

/// Plain-text matrix file: first line "rows cols", then one row per line.
/// Values are written with shortest round-trip formatting.
void write_matrix(const std::string& path, const Mat& m);
Mat read_matrix(const std::string& path);

/// Stream forms of the same format, for files that embed several blocks.
void print_matrix(std::ostream& out, const Mat& m);
Mat parse_matrix(std::istream& in);

void write_vector(const std::string& path, const Vec& v);
Vec read_vector(const std::string& path);

/// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double x);

/// Reshape between the flat row-major pixel vector and a matrix.
Mat to_matrix(const Vec& v, ImageShape shape);
Vec to_vector(const Mat& m);

}  // namespace sgp
