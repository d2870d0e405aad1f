#include "rcs/recovery.hpp"

#include <algorithm>
#include <cmath>

namespace rcs {

RecoveryMethod RecoveryMethod::bp() { return {}; }

RecoveryMethod RecoveryMethod::auo(double delta) {
  if (delta < 0.0) throw ParameterError("AUO: delta must be >= 0");
  RecoveryMethod m;
  m.kind = Kind::AUO;
  m.delta = delta;
  return m;
}

RecoveryMethod RecoveryMethod::ds(double lambda) {
  if (lambda < 0.0) throw ParameterError("DS: lambda must be >= 0");
  RecoveryMethod m;
  m.kind = Kind::DS;
  m.lambda = lambda;
  return m;
}

RecoveryMethod RecoveryMethod::omp_sparsity(std::size_t k) {
  if (k < 1) throw ParameterError("OMP: sparsity must be >= 1");
  RecoveryMethod m;
  m.kind = Kind::OMP;
  m.sparsity = k;
  return m;
}

RecoveryMethod RecoveryMethod::omp_residual(double tol) {
  if (tol < 0.0) throw ParameterError("OMP: residual tolerance must be >= 0");
  RecoveryMethod m;
  m.kind = Kind::OMP;
  m.residual_tol = tol;
  return m;
}

const char* RecoveryMethod::name() const {
  switch (kind) {
    case Kind::BP: return "bp";
    case Kind::AUO: return "auo";
    case Kind::DS: return "ds";
    case Kind::OMP: return "omp";
  }
  return "unknown";
}

namespace {

void check_system(const Mat& B, const Vec& y, const char* op) {
  if (B.rows() == 0 || B.cols() == 0) {
    throw DimensionError(std::string(op) + ": empty measurement matrix");
  }
  if (B.rows() != y.size()) {
    throw DimensionError(std::string(op) + ": B rows != y length");
  }
}

}  // namespace

CompiledProgram compile_bp(const Mat& B, const Vec& y) {
  check_system(B, y, "compile_bp");
  const std::size_t m = B.rows();
  const std::size_t n = B.cols();
  const std::size_t nv = 2 * n;

  ConicProblem p;
  p.c = Vec(nv, 1.0);
  p.b = Vec(m + nv, 0.0);
  p.A = Mat(m + nv, nv, 0.0);
  // Zero block: y - B(p - q) = 0
  for (std::size_t i = 0; i < m; ++i) {
    p.b[i] = y[i];
    for (std::size_t j = 0; j < n; ++j) {
      p.A(i, j) = B(i, j);
      p.A(i, n + j) = -B(i, j);
    }
  }
  // NonNeg blocks: p >= 0, q >= 0
  for (std::size_t j = 0; j < nv; ++j) p.A(m + j, j) = -1.0;
  p.cones = ConeSpec::zero(m).append(ConeKind::NonNeg, nv);

  CompiledProgram out;
  out.problem = std::move(p);
  out.kind = RecoveryMethod::Kind::BP;
  out.signal_dim = n;
  out.B = B;
  out.y = y;
  return out;
}

CompiledProgram compile_auo(const Mat& B, const Vec& y, double delta) {
  check_system(B, y, "compile_auo");
  if (!(delta > 0.0)) {
    throw ParameterError("compile_auo: delta must be > 0 (use BP for delta = 0)");
  }
  const std::size_t m = B.rows();
  const std::size_t n = B.cols();
  const std::size_t nv = 2 * n + 1;  // (p, q, t)
  const std::size_t tcol = 2 * n;
  const double smd = std::sqrt(static_cast<double>(m)) * delta;

  ConicProblem p;
  p.c = Vec(nv, 0.0);
  p.c[tcol] = 1.0;
  const std::size_t rows = 1 + 2 * n + (m + 1);
  p.b = Vec(rows, 0.0);
  p.A = Mat(rows, nv, 0.0);
  // NonNeg: t - 1'(p + q) >= 0
  for (std::size_t j = 0; j < 2 * n; ++j) p.A(0, j) = 1.0;
  p.A(0, tcol) = -1.0;
  // NonNeg: p >= 0, q >= 0
  for (std::size_t j = 0; j < 2 * n; ++j) p.A(1 + j, j) = -1.0;
  // SecondOrder(m + 1): (sqrt(M) delta t, y - B(p - q))
  const std::size_t soc = 1 + 2 * n;
  p.A(soc, tcol) = -smd;
  for (std::size_t i = 0; i < m; ++i) {
    p.b[soc + 1 + i] = y[i];
    for (std::size_t j = 0; j < n; ++j) {
      p.A(soc + 1 + i, j) = B(i, j);
      p.A(soc + 1 + i, n + j) = -B(i, j);
    }
  }
  p.cones = ConeSpec::nonneg(1 + 2 * n).append(ConeKind::SecondOrder, m + 1);

  CompiledProgram out;
  out.problem = std::move(p);
  out.kind = RecoveryMethod::Kind::AUO;
  out.signal_dim = n;
  out.B = B;
  out.y = y;
  out.sqrt_m_delta = smd;
  return out;
}

CompiledProgram compile_ds(const Mat& B, const Vec& y, double lambda) {
  check_system(B, y, "compile_ds");
  if (lambda < 0.0) throw ParameterError("compile_ds: lambda must be >= 0");
  const std::size_t n = B.cols();
  const std::size_t nv = 2 * n;

  // Gram rows encode -lambda <= B'(y - B theta) <= lambda.
  const Mat Bt = transpose(B);
  const Vec bty = matvec_t(B, y);
  ConicProblem p;
  p.c = Vec(nv, 1.0);
  p.b = Vec(4 * n, 0.0);
  p.A = Mat(4 * n, nv, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    // g_i = row i of G = B'B
    const Vec gi = matvec_t(
        B, Vec(std::vector<double>(Bt.row_ptr(i), Bt.row_ptr(i) + B.rows())));
    for (std::size_t j = 0; j < n; ++j) {
      // upper side: lambda - (B'y)_i + (G theta)_i >= 0
      p.A(i, j) = -gi[j];
      p.A(i, n + j) = gi[j];
      // lower side: lambda + (B'y)_i - (G theta)_i >= 0
      p.A(n + i, j) = gi[j];
      p.A(n + i, n + j) = -gi[j];
    }
    p.b[i] = lambda - bty[i];
    p.b[n + i] = lambda + bty[i];
  }
  for (std::size_t j = 0; j < nv; ++j) p.A(2 * n + j, j) = -1.0;
  p.cones = ConeSpec::nonneg(4 * n);

  CompiledProgram out;
  out.problem = std::move(p);
  out.kind = RecoveryMethod::Kind::DS;
  out.signal_dim = n;
  out.B = B;
  out.y = y;
  return out;
}

std::vector<std::size_t> support_detect(const Vec& theta, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw ParameterError("support_detect: tau must be in (0, 1)");
  }
  if (theta.empty()) throw DimensionError("support_detect: empty vector");
  double peak = 0.0;
  for (double x : theta.data()) peak = std::max(peak, std::fabs(x));
  std::vector<std::size_t> out;
  if (peak == 0.0) return out;
  const double threshold = tau * peak;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (std::fabs(theta[i]) >= threshold) out.push_back(i);
  }
  return out;
}

RecoveryResult decompile(const CompiledProgram& program,
                         const ConicSolution& solution, double tau) {
  const std::size_t n = program.signal_dim;
  const std::size_t expect =
      program.kind == RecoveryMethod::Kind::AUO ? 2 * n + 1 : 2 * n;
  if (solution.x.size() != expect) {
    throw DimensionError("decompile: solution dim disagrees with compilation record");
  }
  RecoveryResult out;
  std::vector<double> theta(n);
  for (std::size_t j = 0; j < n; ++j) theta[j] = solution.x[j] - solution.x[n + j];
  out.theta_hat = Vec(std::move(theta));
  out.solver_status = solution.status;
  out.iters = solution.iters;
  if (program.kind == RecoveryMethod::Kind::AUO) {
    out.t_value = solution.x[2 * n];
    const Vec r = sub(program.y, matvec(program.B, out.theta_hat));
    out.objective = std::max(norm1(out.theta_hat), norm2(r) / program.sqrt_m_delta);
  } else {
    out.objective = norm1(out.theta_hat);
  }
  out.support = support_detect(out.theta_hat, tau);
  return out;
}

RecoveryResult omp(const Mat& B, const Vec& y, const OmpStop& stop, double tau) {
  check_system(B, y, "omp");
  if (!stop.sparsity.has_value() && !stop.residual_tol.has_value()) {
    throw ParameterError("omp: a sparsity or residual tolerance stop is required");
  }
  const std::size_t m = B.rows();
  const std::size_t n = B.cols();
  if (stop.sparsity.has_value()) {
    if (*stop.sparsity < 1) throw ParameterError("omp: sparsity must be >= 1");
    if (*stop.sparsity > m) {
      throw ParameterError("omp: sparsity stop cannot exceed the measurement count");
    }
  }

  std::vector<double> col_norm(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = B.row_ptr(i);
    for (std::size_t j = 0; j < n; ++j) col_norm[j] += row[j] * row[j];
  }
  for (std::size_t j = 0; j < n; ++j) {
    col_norm[j] = std::sqrt(col_norm[j]);
    if (col_norm[j] == 0.0) {
      throw ParameterError("omp: column " + std::to_string(j) + " of B is zero");
    }
  }

  const std::size_t max_atoms = stop.sparsity.value_or(m);
  const double tol = stop.residual_tol.value_or(0.0);
  const double tiny = 1e-13 * std::max(1.0, norm2(y));

  std::vector<std::size_t> active;
  std::vector<double> coeffs;
  Vec residual = y;
  while (active.size() < max_atoms) {
    const double rnorm = norm2(residual);
    if (stop.residual_tol.has_value() && rnorm <= tol) break;
    if (rnorm <= tiny) break;

    // pick the column with the largest normalized correlation, lowest
    // index on ties
    Vec corr = matvec_t(B, residual);
    std::size_t best = n;
    double best_val = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::find(active.begin(), active.end(), j) != active.end()) continue;
      const double v = std::fabs(corr[j]) / col_norm[j];
      if (v > best_val) {
        best_val = v;
        best = j;
      }
    }
    if (best == n) break;
    active.push_back(best);

    // least squares on the active set via normal equations
    const std::size_t k = active.size();
    std::vector<double> gram(k * k, 0.0), rhsv(k, 0.0);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b2 = 0; b2 <= a; ++b2) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          acc += B(i, active[a]) * B(i, active[b2]);
        }
        gram[a * k + b2] = acc;
        gram[b2 * k + a] = acc;
      }
      double acc = 0.0;
      for (std::size_t i = 0; i < m; ++i) acc += B(i, active[a]) * y[i];
      rhsv[a] = acc;
    }
    // Cholesky; a failed pivot means the active columns are dependent
    for (std::size_t j = 0; j < k; ++j) {
      double diag = gram[j * k + j];
      for (std::size_t t = 0; t < j; ++t) diag -= gram[j * k + t] * gram[j * k + t];
      if (!(diag > 1e-12 * col_norm[active[j]] * col_norm[active[j]])) {
        throw DictionaryError("omp: active-set least squares is singular");
      }
      gram[j * k + j] = std::sqrt(diag);
      for (std::size_t i = j + 1; i < k; ++i) {
        double acc = gram[i * k + j];
        for (std::size_t t = 0; t < j; ++t) acc -= gram[i * k + t] * gram[j * k + t];
        gram[i * k + j] = acc / gram[j * k + j];
      }
    }
    coeffs = rhsv;
    for (std::size_t i = 0; i < k; ++i) {
      double acc = coeffs[i];
      for (std::size_t t = 0; t < i; ++t) acc -= gram[i * k + t] * coeffs[t];
      coeffs[i] = acc / gram[i * k + i];
    }
    for (std::size_t i = k; i-- > 0;) {
      double acc = coeffs[i];
      for (std::size_t t = i + 1; t < k; ++t) acc -= gram[t * k + i] * coeffs[t];
      coeffs[i] = acc / gram[i * k + i];
    }

    for (std::size_t i = 0; i < m; ++i) {
      double acc = y[i];
      for (std::size_t a = 0; a < k; ++a) acc -= B(i, active[a]) * coeffs[a];
      residual[i] = acc;
    }
  }

  RecoveryResult out;
  std::vector<double> theta(n, 0.0);
  for (std::size_t a = 0; a < active.size(); ++a) theta[active[a]] = coeffs[a];
  out.theta_hat = Vec(std::move(theta));
  out.objective = active.empty() ? 0.0 : norm1(out.theta_hat);
  out.solver_status = SolveStatus::Optimal;
  out.iters = active.size();
  out.support = support_detect(out.theta_hat, tau);
  return out;
}

AucBound auc_bound(const Mat& V, const Vec& theta, double delta) {
  if (V.cols() != theta.size()) {
    throw DimensionError("auc_bound: V cols != theta length");
  }
  if (delta < 0.0) throw ParameterError("auc_bound: delta must be >= 0");
  AucBound out;
  out.lhs = norm2(matvec(V, theta));
  out.rhs = std::sqrt(static_cast<double>(V.rows())) * delta * norm1(theta);
  out.holds = out.lhs <= out.rhs;
  return out;
}

RecoveryResult recover(const Mat& B, const Vec& y, const RecoveryMethod& method,
                       const SolverSettings& settings, double tau) {
  switch (method.kind) {
    case RecoveryMethod::Kind::BP: {
      const CompiledProgram cp = compile_bp(B, y);
      return decompile(cp, solve_conic(cp.problem, settings), tau);
    }
    case RecoveryMethod::Kind::AUO: {
      const CompiledProgram cp = compile_auo(B, y, method.delta);
      return decompile(cp, solve_conic(cp.problem, settings), tau);
    }
    case RecoveryMethod::Kind::DS: {
      const CompiledProgram cp = compile_ds(B, y, method.lambda);
      return decompile(cp, solve_conic(cp.problem, settings), tau);
    }
    case RecoveryMethod::Kind::OMP: {
      OmpStop stop{method.sparsity, method.residual_tol};
      return omp(B, y, stop, tau);
    }
  }
  throw ParameterError("recover: unknown method");
}

}  // namespace rcs
