#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rcs/errors.hpp"

namespace rcs {

/// Dense real vector. Constructors reject NaN/Inf so downstream code can
/// assume finite entries. Treat as immutable once shared across threads.
class Vec {
 public:
  Vec() = default;
  explicit Vec(std::size_t n, double fill = 0.0);
  Vec(std::initializer_list<double> values);
  explicit Vec(std::vector<double> values);

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool operator==(const Vec& other) const { return data_ == other.data_; }

 private:
  std::vector<double> data_;
};

/// Dense row-major real matrix, finite entries only.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0);
  Mat(std::size_t rows, std::size_t cols, std::vector<double> values);
  static Mat identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool operator==(const Mat& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double norm1(const Vec& v);
double norm2(const Vec& v);
double norm_inf(const Vec& v);

/// Induced l-infinity matrix norm: max over rows of the row absolute sum.
double mat_inf_norm(const Mat& m);

Vec matvec(const Mat& m, const Vec& v);
Vec matvec_t(const Mat& m, const Vec& v);

double dot(const Vec& a, const Vec& b);
Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scale(const Vec& v, double alpha);
Mat add(const Mat& a, const Mat& b);
Mat transpose(const Mat& m);

/// Power-iteration estimate of the largest singular value; the starting
/// vector is drawn from `seed` so the result is deterministic.
double spectral_norm_estimate(const Mat& m, std::size_t iters, std::uint64_t seed);

// Shared matrix text format: first line "# <rows> <cols>" (vectors use
// cols = 1), then one row per line, entries printed with 17 significant
// digits so a write/read round trip is bit identical.
void write_matrix(std::ostream& out, const Mat& m);
void write_vector(std::ostream& out, const Vec& v);

/// Reads one matrix block; `line_no` is advanced past the consumed lines
/// and used for ParseError positions.
Mat read_matrix(std::istream& in, std::size_t& line_no);
Vec read_vector(std::istream& in, std::size_t& line_no);

}  // namespace rcs
