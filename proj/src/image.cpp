#include "sgpkit/image.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace sgp {

std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  if (res.ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, res.ptr);
}

void print_matrix(std::ostream& out, const Mat& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

Mat parse_matrix(std::istream& in) {
  Eigen::Index rows = 0, cols = 0;
  in >> rows >> cols;
  if (!in || rows < 0 || cols < 0)
    throw std::runtime_error("bad matrix header");
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      if (!(in >> m(i, j))) throw std::runtime_error("truncated matrix");
  return m;
}

void write_matrix(const std::string& path, const Mat& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  print_matrix(out, m);
  if (!out) throw std::runtime_error("write failed: " + path);
}

Mat read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  try {
    return parse_matrix(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(std::string(e.what()) + " in " + path);
  }
}

void write_vector(const std::string& path, const Vec& v) {
  write_matrix(path, v);
}

Vec read_vector(const std::string& path) {
  Mat m = read_matrix(path);
  if (m.cols() != 1) {
    if (m.rows() == 1) return m.transpose();
    throw std::runtime_error("not a vector: " + path);
  }
  return m.col(0);
}

Mat to_matrix(const Vec& v, ImageShape shape) {
  if (v.size() != shape.size())
    throw std::invalid_argument("to_matrix: size mismatch");
  Mat m(shape.h, shape.w);
  for (int i = 0; i < shape.h; ++i)
    for (int j = 0; j < shape.w; ++j) m(i, j) = v[shape.at(i, j)];
  return m;
}

Vec to_vector(const Mat& m) {
  const ImageShape shape{static_cast<int>(m.rows()),
                         static_cast<int>(m.cols())};
  Vec v(shape.size());
  for (int i = 0; i < shape.h; ++i)
    for (int j = 0; j < shape.w; ++j) v[shape.at(i, j)] = m(i, j);
  return v;
}

}  // namespace sgp
