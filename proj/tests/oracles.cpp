#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rcs/errors.hpp"

namespace oracle {
namespace {

// Gaussian elimination with partial pivoting; false when singular.
bool solve_square(std::vector<double> a, std::vector<double> b, std::size_t n,
                  std::vector<double>& x) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r * n + col]) > std::fabs(a[pivot * n + col])) pivot = r;
    }
    if (std::fabs(a[pivot * n + col]) < 1e-12) return false;
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[col * n + j], a[pivot * n + j]);
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      double f = a[r * n + col] / a[col * n + col];
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
      b[r] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= a[i * n + j] * x[j];
    x[i] = acc / a[i * n + i];
  }
  return true;
}

}  // namespace

LpVertex lp_enumerate(const rcs::ConicProblem& problem, double feas_tol) {
  const std::size_t n = problem.num_vars();
  const std::size_t m = problem.num_rows();
  std::vector<bool> is_eq(m, false);
  {
    std::size_t at = 0;
    for (const auto& block : problem.cones.blocks()) {
      if (block.kind == rcs::ConeKind::SecondOrder) {
        throw rcs::ParameterError("lp_enumerate: second-order block");
      }
      for (std::size_t i = 0; i < block.dim; ++i) {
        is_eq[at + i] = block.kind == rcs::ConeKind::Zero;
      }
      at += block.dim;
    }
  }

  LpVertex best;
  if (m < n) return best;
  std::vector<std::size_t> pick(n);
  for (std::size_t i = 0; i < n; ++i) pick[i] = i;

  std::vector<double> sq(n * n), rhs(n), x;
  while (true) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r = pick[i];
      for (std::size_t j = 0; j < n; ++j) sq[i * n + j] = problem.A(r, j);
      rhs[i] = problem.b[r];
    }
    if (solve_square(sq, rhs, n, x)) {
      bool feasible = true;
      for (std::size_t r = 0; r < m && feasible; ++r) {
        double ax = 0.0;
        for (std::size_t j = 0; j < n; ++j) ax += problem.A(r, j) * x[j];
        const double slack = problem.b[r] - ax;
        const double tol = feas_tol * (1.0 + std::fabs(problem.b[r]));
        if (is_eq[r] ? std::fabs(slack) > tol : slack < -tol) feasible = false;
      }
      if (feasible) {
        double obj = 0.0;
        for (std::size_t j = 0; j < n; ++j) obj += problem.c[j] * x[j];
        if (!best.found || obj < best.objective) {
          best.found = true;
          best.objective = obj;
          best.x = rcs::Vec(x);
        }
      }
    }
    // next combination
    std::size_t i = n;
    while (i-- > 0) {
      if (pick[i] != i + m - n) break;
      if (i == 0) return best;
    }
    if (pick[i] == i + m - n) return best;
    ++pick[i];
    for (std::size_t j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
  }
}

GridPoint auo_grid_1d(double b, double y, double delta, double lo, double hi,
                      double step) {
  GridPoint best;
  bool first = true;
  const long long count = static_cast<long long>(std::llround((hi - lo) / step));
  for (long long i = 0; i <= count; ++i) {
    const double theta = lo + static_cast<double>(i) * step;
    const double value = std::max(std::fabs(theta), std::fabs(y - b * theta) / delta);
    if (first || value < best.value) {
      first = false;
      best.theta = theta;
      best.value = value;
    }
  }
  return best;
}

rcs::Mat orthonormal_columns(std::size_t rows, std::size_t cols, rcs::Rng& rng) {
  if (cols > rows) throw rcs::DimensionError("orthonormal_columns: cols > rows");
  rcs::Mat q(rows, cols);
  for (std::size_t j = 0; j < cols; ++j) {
    std::vector<double> v(rows);
    while (true) {
      for (std::size_t i = 0; i < rows; ++i) v[i] = rng.normal(1.0);
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < j; ++k) {
          double proj = 0.0;
          for (std::size_t i = 0; i < rows; ++i) proj += q(i, k) * v[i];
          for (std::size_t i = 0; i < rows; ++i) v[i] -= proj * q(i, k);
        }
      }
      double norm = 0.0;
      for (double vi : v) norm += vi * vi;
      norm = std::sqrt(norm);
      if (norm > 1e-8) {
        for (std::size_t i = 0; i < rows; ++i) q(i, j) = v[i] / norm;
        break;
      }
    }
  }
  return q;
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw rcs::DimensionError("spearman: need two equal-length samples");
  }
  const std::vector<double> rx = ranks(xs);
  const std::vector<double> ry = ranks(ys);
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace oracle
