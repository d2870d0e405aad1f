#include "rcs/linalg.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

namespace rcs {

namespace {

void check_finite(const std::vector<double>& values, const char* what) {
  for (double x : values) {
    if (!std::isfinite(x)) {
      throw ParameterError(std::string(what) + ": non-finite entry rejected");
    }
  }
}

}  // namespace

Vec::Vec(std::size_t n, double fill) : data_(n, fill) {
  check_finite(data_, "Vec");
}

Vec::Vec(std::initializer_list<double> values) : data_(values) {
  check_finite(data_, "Vec");
}

Vec::Vec(std::vector<double> values) : data_(std::move(values)) {
  check_finite(data_, "Vec");
}

Mat::Mat(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  check_finite(data_, "Mat");
}

Mat::Mat(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("Mat: rows*cols does not match element count");
  }
  check_finite(data_, "Mat");
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double norm1(const Vec& v) {
  if (v.empty()) throw DimensionError("norm1: empty vector");
  double s = 0.0;
  for (double x : v.data()) s += std::fabs(x);
  return s;
}

double norm2(const Vec& v) {
  if (v.empty()) throw DimensionError("norm2: empty vector");
  double s = 0.0;
  for (double x : v.data()) s += x * x;
  return std::sqrt(s);
}

double norm_inf(const Vec& v) {
  if (v.empty()) throw DimensionError("norm_inf: empty vector");
  double s = 0.0;
  for (double x : v.data()) s = std::max(s, std::fabs(x));
  return s;
}

double mat_inf_norm(const Mat& m) {
  if (m.rows() == 0 || m.cols() == 0) {
    throw DimensionError("mat_inf_norm: empty matrix");
  }
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double row_sum = 0.0;
    const double* row = m.row_ptr(i);
    for (std::size_t j = 0; j < m.cols(); ++j) row_sum += std::fabs(row[j]);
    best = std::max(best, row_sum);
  }
  return best;
}

Vec matvec(const Mat& m, const Vec& v) {
  if (m.cols() != v.size()) throw DimensionError("matvec: dimension mismatch");
  std::vector<double> out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* row = m.row_ptr(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) acc += row[j] * v[j];
    out[i] = acc;
  }
  return Vec(std::move(out));
}

Vec matvec_t(const Mat& m, const Vec& v) {
  if (m.rows() != v.size()) {
    throw DimensionError("matvec_t: dimension mismatch");
  }
  std::vector<double> out(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* row = m.row_ptr(i);
    const double vi = v[i];
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += row[j] * vi;
  }
  return Vec(std::move(out));
}

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Vec add(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("add: dimension mismatch");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return Vec(std::move(out));
}

Vec sub(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("sub: dimension mismatch");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return Vec(std::move(out));
}

Vec scale(const Vec& v, double alpha) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = alpha * v[i];
  return Vec(std::move(out));
}

Mat add(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("add: matrix dimension mismatch");
  }
  std::vector<double> out(a.data().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  return Mat(a.rows(), a.cols(), std::move(out));
}

Mat transpose(const Mat& m) {
  Mat out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
  }
  return out;
}

double spectral_norm_estimate(const Mat& m, std::size_t iters, std::uint64_t seed) {
  if (m.rows() == 0 || m.cols() == 0) {
    throw DimensionError("spectral_norm_estimate: empty matrix");
  }
  if (iters < 1) throw ParameterError("spectral_norm_estimate: iters < 1");
  std::mt19937_64 engine(seed);
  std::vector<double> v(m.cols());
  for (double& x : v) {
    // 53-bit uniform in [-1, 1)
    x = 2.0 * ((engine() >> 11) * 0x1.0p-53) - 1.0;
  }
  Vec vv(std::move(v));
  double nv = norm2(vv);
  if (nv == 0.0) vv[0] = 1.0, nv = 1.0;
  vv = scale(vv, 1.0 / nv);
  double sigma = 0.0;
  for (std::size_t k = 0; k < iters; ++k) {
    Vec av = matvec(m, vv);
    sigma = norm2(av);
    if (sigma == 0.0) return 0.0;
    Vec atav = matvec_t(m, av);
    double n = norm2(atav);
    if (n == 0.0) return sigma;
    vv = scale(atav, 1.0 / n);
  }
  return sigma;
}

namespace {

void write_value(std::ostream& out, double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  out << buf;
}

std::string next_content_line(std::istream& in, std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty()) return line;
  }
  throw ParseError(line_no + 1, "unexpected end of input");
}

}  // namespace

void write_matrix(std::ostream& out, const Mat& m) {
  out << "# " << m.rows() << " " << m.cols() << "\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << " ";
      write_value(out, m(i, j));
    }
    out << "\n";
  }
}

void write_vector(std::ostream& out, const Vec& v) {
  out << "# " << v.size() << " 1\n";
  for (std::size_t i = 0; i < v.size(); ++i) {
    write_value(out, v[i]);
    out << "\n";
  }
}

Mat read_matrix(std::istream& in, std::size_t& line_no) {
  std::string header = next_content_line(in, line_no);
  std::istringstream hs(header);
  char hash = 0;
  long long rows = -1, cols = -1;
  hs >> hash >> rows >> cols;
  if (hash != '#' || hs.fail() || rows < 1 || cols < 1) {
    throw ParseError(line_no, "expected matrix header '# <rows> <cols>'");
  }
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(rows * cols));
  for (long long i = 0; i < rows; ++i) {
    std::string line = next_content_line(in, line_no);
    std::istringstream ls(line);
    for (long long j = 0; j < cols; ++j) {
      double x;
      if (!(ls >> x)) {
        throw ParseError(line_no, "expected " + std::to_string(cols) +
                                      " values in matrix row");
      }
      values.push_back(x);
    }
    double extra;
    if (ls >> extra) {
      throw ParseError(line_no, "too many values in matrix row");
    }
  }
  try {
    return Mat(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols),
               std::move(values));
  } catch (const Error& e) {
    throw ParseError(line_no, e.what());
  }
}

Vec read_vector(std::istream& in, std::size_t& line_no) {
  Mat m = read_matrix(in, line_no);
  if (m.cols() != 1) {
    throw ParseError(line_no, "expected a column vector (cols = 1)");
  }
  return Vec(m.data());
}

}  // namespace rcs
