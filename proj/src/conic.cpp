#include "rcs/conic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace rcs {

namespace {

constexpr double kSigma = 1e-6;        // proximal regularization of the x step
constexpr std::size_t kRuizPasses = 10;
constexpr std::size_t kCheckInterval = 25;
constexpr double kDivergenceNorm = 1e8;
// Residual-balancing bounds for the adaptive penalty.
constexpr double kRhoMin = 1e-6;
constexpr double kRhoMax = 1e6;
constexpr double kRhoChangeThreshold = 5.0;
// Zero-cone rows are hard equalities; a stiffer penalty there avoids the
// slow feasibility tail typical of a uniform penalty.
constexpr double kZeroRhoBoost = 1e3;

}  // namespace

ConeSpec::ConeSpec(std::vector<ConeBlock> blocks) {
  for (const ConeBlock& blk : blocks) append(blk.kind, blk.dim);
}

ConeSpec ConeSpec::zero(std::size_t dim) { return ConeSpec().append(ConeKind::Zero, dim); }
ConeSpec ConeSpec::nonneg(std::size_t dim) { return ConeSpec().append(ConeKind::NonNeg, dim); }
ConeSpec ConeSpec::second_order(std::size_t dim) {
  return ConeSpec().append(ConeKind::SecondOrder, dim);
}

ConeSpec& ConeSpec::append(ConeKind kind, std::size_t dim) {
  if (dim < 1) throw DimensionError("ConeSpec: block dim must be >= 1");
  blocks_.push_back({kind, dim});
  total_dim_ += dim;
  return *this;
}

namespace {

// Blockwise Euclidean projection, in place.
void project_cone_inplace(double* p, const ConeSpec& cones) {
  std::size_t at = 0;
  for (const ConeBlock& blk : cones.blocks()) {
    switch (blk.kind) {
      case ConeKind::Zero:
        std::fill(p + at, p + at + blk.dim, 0.0);
        break;
      case ConeKind::NonNeg:
        for (std::size_t i = 0; i < blk.dim; ++i) {
          p[at + i] = std::max(p[at + i], 0.0);
        }
        break;
      case ConeKind::SecondOrder: {
        const double t = p[at];
        double nx = 0.0;
        for (std::size_t i = 1; i < blk.dim; ++i) nx += p[at + i] * p[at + i];
        nx = std::sqrt(nx);
        if (nx <= t) {
          // inside, unchanged
        } else if (nx <= -t) {
          std::fill(p + at, p + at + blk.dim, 0.0);
        } else {
          const double alpha = 0.5 * (nx + t);
          p[at] = alpha;
          const double scale = alpha / nx;
          for (std::size_t i = 1; i < blk.dim; ++i) p[at + i] *= scale;
        }
        break;
      }
    }
    at += blk.dim;
  }
}

}  // namespace

Vec project_cone(const Vec& point, const ConeSpec& cones) {
  if (point.size() != cones.total_dim()) {
    throw DimensionError("project_cone: point dim != cone total dim");
  }
  std::vector<double> p = point.data();
  project_cone_inplace(p.data(), cones);
  return Vec(std::move(p));
}

void ConicProblem::validate() const {
  if (c.empty() || b.empty()) throw DimensionError("ConicProblem: empty c or b");
  if (A.rows() != b.size() || A.cols() != c.size()) {
    throw DimensionError("ConicProblem: A dims disagree with b/c");
  }
  if (cones.total_dim() != b.size()) {
    throw DimensionError("ConicProblem: cone total dim != number of rows");
  }
}

void SolverSettings::validate() const {
  if (eps_primal <= 0 || eps_dual <= 0 || eps_gap <= 0) {
    throw ParameterError("SolverSettings: tolerances must be > 0");
  }
  if (!(over_relaxation > 0.0 && over_relaxation < 2.0)) {
    throw ParameterError("SolverSettings: over_relaxation must be in (0, 2)");
  }
  if (max_iters < 1) throw ParameterError("SolverSettings: max_iters < 1");
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::MaxIters: return "MaxIters";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
  }
  return "Unknown";
}

Residuals residuals(const ConicProblem& problem, const ConicSolution& solution) {
  problem.validate();
  if (solution.x.size() != problem.num_vars() ||
      solution.s.size() != problem.num_rows() ||
      solution.dual.size() != problem.num_rows()) {
    throw DimensionError("residuals: solution dims disagree with problem");
  }
  const Vec ax = matvec(problem.A, solution.x);
  double pr = 0.0;
  for (std::size_t i = 0; i < problem.num_rows(); ++i) {
    const double r = ax[i] + solution.s[i] - problem.b[i];
    pr += r * r;
  }
  const Vec aty = matvec_t(problem.A, solution.dual);
  double du = 0.0;
  for (std::size_t j = 0; j < problem.num_vars(); ++j) {
    const double r = aty[j] + problem.c[j];
    du += r * r;
  }
  const double cx = dot(problem.c, solution.x);
  const double by = dot(problem.b, solution.dual);
  Residuals out;
  out.primal = std::sqrt(pr) / (1.0 + norm2(problem.b));
  out.dual = std::sqrt(du) / (1.0 + norm2(problem.c));
  out.gap = std::fabs(cx + by) / (1.0 + std::fabs(cx) + std::fabs(by));
  return out;
}

namespace {

struct Scaling {
  std::vector<double> row;  // d: scaled rows are d_i * a_i
  std::vector<double> col;  // e
};

// Ruiz equilibration. Rows inside a second-order block share one factor so
// the scaled slack stays in the same cone.
Scaling ruiz_equilibrate(Mat& a, const ConeSpec& cones) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Scaling sc{std::vector<double>(m, 1.0), std::vector<double>(n, 1.0)};
  std::vector<double> row_norm(m), col_norm(n);
  for (std::size_t pass = 0; pass < kRuizPasses; ++pass) {
    std::fill(row_norm.begin(), row_norm.end(), 0.0);
    std::fill(col_norm.begin(), col_norm.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double* row = a.row_ptr(i);
      for (std::size_t j = 0; j < n; ++j) {
        const double v = std::fabs(row[j]);
        row_norm[i] = std::max(row_norm[i], v);
        col_norm[j] = std::max(col_norm[j], v);
      }
    }
    std::size_t at = 0;
    for (const ConeBlock& blk : cones.blocks()) {
      if (blk.kind == ConeKind::SecondOrder) {
        double blk_norm = 0.0;
        for (std::size_t i = 0; i < blk.dim; ++i) {
          blk_norm = std::max(blk_norm, row_norm[at + i]);
        }
        for (std::size_t i = 0; i < blk.dim; ++i) row_norm[at + i] = blk_norm;
      }
      at += blk.dim;
    }
    for (std::size_t i = 0; i < m; ++i) {
      row_norm[i] = row_norm[i] > 0.0 ? 1.0 / std::sqrt(row_norm[i]) : 1.0;
      sc.row[i] *= row_norm[i];
    }
    for (std::size_t j = 0; j < n; ++j) {
      col_norm[j] = col_norm[j] > 0.0 ? 1.0 / std::sqrt(col_norm[j]) : 1.0;
      sc.col[j] *= col_norm[j];
    }
    for (std::size_t i = 0; i < m; ++i) {
      double* row = a.data().data() + i * n;
      for (std::size_t j = 0; j < n; ++j) row[j] *= row_norm[i] * col_norm[j];
    }
  }
  return sc;
}

// Dense Cholesky of sigma*I + A'(rho W)A with W the fixed per-row penalty
// weights, factor stored in the lower triangle. The weighted Gram matrix is
// computed once; refactor() is cheap enough to call whenever the scalar
// penalty changes.
class NormalEquationFactor {
 public:
  NormalEquationFactor(const Mat& a, const std::vector<double>& row_weight,
                       double sigma, double rho)
      : n_(a.cols()), gram_(n_ * n_, 0.0), l_(n_ * n_, 0.0) {
    const std::size_t m = a.rows();
    for (std::size_t i = 0; i < m; ++i) {
      const double* row = a.row_ptr(i);
      const double wi = row_weight[i];
      for (std::size_t j = 0; j < n_; ++j) {
        const double aij = wi * row[j];
        if (aij == 0.0) continue;
        double* grow = gram_.data() + j * n_;
        for (std::size_t k = 0; k <= j; ++k) grow[k] += aij * row[k];
      }
    }
    refactor(sigma, rho);
  }

  void refactor(double sigma, double rho) {
    for (std::size_t j = 0; j < n_; ++j) {
      double* lj = l_.data() + j * n_;
      const double* gj = gram_.data() + j * n_;
      for (std::size_t k = 0; k <= j; ++k) lj[k] = rho * gj[k];
      lj[j] += sigma;
    }
    factorize();
  }

  void solve(std::vector<double>& x) const {
    // L y = x
    for (std::size_t i = 0; i < n_; ++i) {
      const double* lrow = l_.data() + i * n_;
      double acc = x[i];
      for (std::size_t k = 0; k < i; ++k) acc -= lrow[k] * x[k];
      x[i] = acc / lrow[i];
    }
    // L' x = y
    for (std::size_t i = n_; i-- > 0;) {
      double acc = x[i];
      for (std::size_t k = i + 1; k < n_; ++k) acc -= l_[k * n_ + i] * x[k];
      x[i] = acc / l_[i * n_ + i];
    }
  }

 private:
  void factorize() {
    for (std::size_t j = 0; j < n_; ++j) {
      double* lj = l_.data() + j * n_;
      double diag = lj[j];
      for (std::size_t k = 0; k < j; ++k) diag -= lj[k] * lj[k];
      if (!(diag > 0.0)) {
        throw NumericalError("conic: KKT factorization lost positive definiteness");
      }
      lj[j] = std::sqrt(diag);
      const double inv = 1.0 / lj[j];
      for (std::size_t i = j + 1; i < n_; ++i) {
        double* li = l_.data() + i * n_;
        double acc = li[j];
        for (std::size_t k = 0; k < j; ++k) acc -= li[k] * lj[k];
        li[j] = acc * inv;
      }
    }
  }

  std::size_t n_;
  std::vector<double> gram_;
  std::vector<double> l_;
};

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

bool lp_cones_only(const ConeSpec& cones) {
  for (const ConeBlock& blk : cones.blocks()) {
    if (blk.kind == ConeKind::SecondOrder) return false;
  }
  return true;
}

// Active-set polish for LP-shaped problems. First-order iterates crawl
// through the last decade towards a degenerate vertex; solving the reduced
// KKT system directly from the guessed active set lands on it. The result
// is accepted only when the full optimality certificate passes, so a wrong
// guess costs nothing but time.
struct PolishOutcome {
  bool ok = false;
  ConicSolution solution;
};

PolishOutcome try_polish(const ConicProblem& problem, const Vec& slack,
                         const Vec& dual, const SolverSettings& settings) {
  PolishOutcome out;
  const std::size_t m = problem.num_rows();
  const std::size_t n = problem.num_vars();

  std::vector<std::size_t> active;
  active.reserve(m);
  std::vector<char> is_zero_row(m, 0);
  {
    std::size_t at = 0;
    for (const ConeBlock& blk : problem.cones.blocks()) {
      for (std::size_t i = 0; i < blk.dim; ++i) {
        const std::size_t row = at + i;
        if (blk.kind == ConeKind::Zero) {
          is_zero_row[row] = 1;
          active.push_back(row);
        } else if (dual[row] >= slack[row]) {
          active.push_back(row);
        }
      }
      at += blk.dim;
    }
  }
  if (active.empty()) return out;
  const std::size_t ma = active.size();

  Mat a_act(ma, n, 0.0);
  std::vector<double> b_act(ma);
  for (std::size_t r = 0; r < ma; ++r) {
    const double* src = problem.A.row_ptr(active[r]);
    std::copy(src, src + n, a_act.data().data() + r * n);
    b_act[r] = problem.b[active[r]];
  }

  double scale = 0.0;
  for (double v : a_act.data()) scale = std::max(scale, std::fabs(v));
  const double sigma = 1e-10 * (1.0 + scale * scale);
  const std::vector<double> unit_weights_rows(ma, 1.0);

  auto matvec_act = [&](const std::vector<double>& v, std::vector<double>& dst) {
    for (std::size_t r = 0; r < ma; ++r) {
      const double* row = a_act.row_ptr(r);
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += row[j] * v[j];
      dst[r] = acc;
    }
  };
  auto matvec_act_t = [&](const std::vector<double>& v, std::vector<double>& dst) {
    std::fill(dst.begin(), dst.end(), 0.0);
    for (std::size_t r = 0; r < ma; ++r) {
      const double* row = a_act.row_ptr(r);
      const double vr = v[r];
      if (vr == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) dst[j] += row[j] * vr;
    }
  };

  // Primal: least-squares solution of A_act x = b_act with two rounds of
  // iterative refinement against the unregularized normal equations.
  std::vector<double> px(n), tmp_m(ma), tmp_n(n);
  try {
    NormalEquationFactor primal_factor(a_act, unit_weights_rows, sigma, 1.0);
    matvec_act_t(b_act, px);
    primal_factor.solve(px);
    for (int round = 0; round < 2; ++round) {
      matvec_act(px, tmp_m);
      for (std::size_t r = 0; r < ma; ++r) tmp_m[r] = b_act[r] - tmp_m[r];
      matvec_act_t(tmp_m, tmp_n);
      primal_factor.solve(tmp_n);
      for (std::size_t j = 0; j < n; ++j) px[j] += tmp_n[j];
    }

    // Dual: least-squares solution of A_act' y = -c via the Gram of the
    // transpose, same refinement scheme.
    const Mat a_act_t = transpose(a_act);
    const std::vector<double> unit_weights_cols(n, 1.0);
    NormalEquationFactor dual_factor(a_act_t, unit_weights_cols, sigma, 1.0);
    std::vector<double> py(ma);
    for (std::size_t r = 0; r < ma; ++r) py[r] = 0.0;
    std::vector<double> minus_c(problem.c.data());
    for (double& v : minus_c) v = -v;
    matvec_act(minus_c, py);
    dual_factor.solve(py);
    for (int round = 0; round < 2; ++round) {
      matvec_act_t(py, tmp_n);
      for (std::size_t j = 0; j < n; ++j) tmp_n[j] = minus_c[j] - tmp_n[j];
      matvec_act(tmp_n, tmp_m);
      dual_factor.solve(tmp_m);
      for (std::size_t r = 0; r < ma; ++r) py[r] += tmp_m[r];
    }

    if (!all_finite(px) || !all_finite(py)) return out;

    std::vector<double> full_s(m, 0.0), full_y(m, 0.0);
    std::vector<double> ax(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double* row = problem.A.row_ptr(i);
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += row[j] * px[j];
      ax[i] = acc;
      if (!is_zero_row[i]) full_s[i] = std::max(problem.b[i] - acc, 0.0);
    }
    for (std::size_t r = 0; r < ma; ++r) {
      const std::size_t row = active[r];
      full_y[row] = is_zero_row[row] ? py[r] : std::max(py[r], 0.0);
    }

    ConicSolution candidate;
    candidate.x = Vec(std::move(px));
    candidate.s = Vec(std::move(full_s));
    candidate.dual = Vec(std::move(full_y));
    const Residuals res = residuals(problem, candidate);
    if (res.primal <= settings.eps_primal && res.dual <= settings.eps_dual &&
        res.gap <= settings.eps_gap) {
      candidate.status = SolveStatus::Optimal;
      candidate.residuals = res;
      out.ok = true;
      out.solution = std::move(candidate);
    }
  } catch (const NumericalError&) {
    // singular reduced system: active-set guess was wrong, keep iterating
  }
  return out;
}

}  // namespace

ConicSolution solve_conic(const ConicProblem& problem, const SolverSettings& settings) {
  problem.validate();
  settings.validate();
  const std::size_t m = problem.num_rows();
  const std::size_t n = problem.num_vars();
  const double alpha = settings.over_relaxation;

  Mat ahat = problem.A;
  Scaling sc = ruiz_equilibrate(ahat, problem.cones);
  const double nu = spectral_norm_estimate(ahat, 50, settings.seed);
  if (nu > 0.0) {
    const double inv_nu = 1.0 / nu;
    for (double& v : ahat.data()) v *= inv_nu;
    for (double& d : sc.row) d *= inv_nu;
  }

  std::vector<double> bhat(m), chat(n);
  for (std::size_t i = 0; i < m; ++i) bhat[i] = sc.row[i] * problem.b[i];
  for (std::size_t j = 0; j < n; ++j) chat[j] = sc.col[j] * problem.c[j];

  std::vector<double> row_weight(m, 1.0);
  {
    std::size_t at = 0;
    for (const ConeBlock& blk : problem.cones.blocks()) {
      if (blk.kind == ConeKind::Zero) {
        std::fill(row_weight.begin() + at, row_weight.begin() + at + blk.dim,
                  kZeroRhoBoost);
      }
      at += blk.dim;
    }
  }
  double rho = 1.0;
  NormalEquationFactor factor(ahat, row_weight, kSigma, rho);

  std::ofstream trace;
  const bool tracing = !settings.trace_path.empty();
  if (tracing) {
    trace.open(settings.trace_path);
    trace << "iter,primal_res,dual_res,gap\n";
  }

  std::vector<double> x(n, 0.0), z(m, 0.0), u(m, 0.0);
  std::vector<double> rhs(n), ax(m), w(m), proj(m);

  // Unscaled candidate assembled at every convergence check.
  Vec cx(n), cs(m), cy(m);
  auto unscale_candidate = [&]() {
    for (std::size_t j = 0; j < n; ++j) cx[j] = sc.col[j] * x[j];
    for (std::size_t i = 0; i < m; ++i) {
      cs[i] = (bhat[i] - z[i]) / sc.row[i];
      cy[i] = sc.row[i] * rho * row_weight[i] * u[i];
    }
  };
  const double bnorm = norm2(problem.b);
  const double cnorm = problem.c.empty() ? 0.0 : norm2(problem.c);
  auto unscaled_residuals = [&]() {
    Residuals r;
    double pr = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double* row = problem.A.row_ptr(i);
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += row[j] * cx[j];
      const double v = acc + cs[i] - problem.b[i];
      pr += v * v;
    }
    std::vector<double> duv(problem.c.data());
    for (std::size_t i = 0; i < m; ++i) {
      const double* row = problem.A.row_ptr(i);
      const double yi = cy[i];
      if (yi == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) duv[j] += row[j] * yi;
    }
    double du = 0.0;
    for (std::size_t j = 0; j < n; ++j) du += duv[j] * duv[j];
    const double cxv = dot(problem.c, cx);
    const double byv = dot(problem.b, cy);
    r.primal = std::sqrt(pr) / (1.0 + bnorm);
    r.dual = std::sqrt(du) / (1.0 + cnorm);
    r.gap = std::fabs(cxv + byv) / (1.0 + std::fabs(cxv) + std::fabs(byv));
    return r;
  };

  const bool polishable = lp_cones_only(problem.cones);
  std::size_t next_polish_iter = 0;

  ConicSolution out;
  for (std::size_t k = 0; k < settings.max_iters; ++k) {
    // x step: (sigma I + A'(rho W)A) x = sigma x + A'(rho W)(z - u) - c
    for (std::size_t j = 0; j < n; ++j) rhs[j] = kSigma * x[j] - chat[j];
    for (std::size_t i = 0; i < m; ++i) {
      const double* row = ahat.row_ptr(i);
      const double zi = rho * row_weight[i] * (z[i] - u[i]);
      if (zi == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) rhs[j] += row[j] * zi;
    }
    factor.solve(rhs);
    x.swap(rhs);

    for (std::size_t i = 0; i < m; ++i) {
      const double* row = ahat.row_ptr(i);
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
      ax[i] = acc;
    }

    // relaxed z step: project b - (alpha Ax + (1-alpha) z + u) onto K
    for (std::size_t i = 0; i < m; ++i) {
      w[i] = alpha * ax[i] + (1.0 - alpha) * z[i];
      proj[i] = bhat[i] - w[i] - u[i];
    }
    project_cone_inplace(proj.data(), problem.cones);
    for (std::size_t i = 0; i < m; ++i) {
      const double znew = bhat[i] - proj[i];
      u[i] += w[i] - znew;
      z[i] = znew;
    }

    // Convergence, divergence, and penalty updates run on a fixed schedule
    // so tracing never changes the iterate path or the answer.
    const std::size_t iter = k + 1;
    const bool at_check = iter % kCheckInterval == 0 || iter == settings.max_iters;
    if (!tracing && !at_check) continue;

    if (!all_finite(x) || !all_finite(u)) {
      throw NumericalError("conic: non-finite iterate at iteration " +
                           std::to_string(iter));
    }
    unscale_candidate();
    const Residuals res = unscaled_residuals();
    if (tracing) {
      char line[128];
      std::snprintf(line, sizeof(line), "%zu,%.12g,%.12g,%.12g\n", iter,
                    res.primal, res.dual, res.gap);
      trace << line;
    }
    if (!at_check) continue;
    if (res.primal <= settings.eps_primal && res.dual <= settings.eps_dual &&
        res.gap <= settings.eps_gap) {
      out.status = SolveStatus::Optimal;
      out.iters = iter;
      out.x = cx;
      out.s = cs;
      out.dual = cy;
      out.residuals = res;
      return out;
    }

    const double xinf = norm_inf(cx);
    const double yinf = norm_inf(cy);
    if (yinf > kDivergenceNorm && res.primal > 100.0 * settings.eps_primal) {
      out.status = SolveStatus::Infeasible;
      out.iters = iter;
      out.x = cx;
      out.s = cs;
      out.dual = cy;
      out.residuals = res;
      return out;
    }
    if (xinf > kDivergenceNorm &&
        (res.dual > 100.0 * settings.eps_dual || res.gap > 100.0 * settings.eps_gap)) {
      out.status = SolveStatus::Unbounded;
      out.iters = iter;
      out.x = cx;
      out.s = cs;
      out.dual = cy;
      out.residuals = res;
      return out;
    }

    if (polishable && iter >= next_polish_iter &&
        res.primal <= 100.0 * settings.eps_primal &&
        res.dual <= 100.0 * settings.eps_dual &&
        res.gap <= 100.0 * settings.eps_gap) {
      next_polish_iter = iter + 10 * kCheckInterval;
      PolishOutcome polished = try_polish(problem, cs, cy, settings);
      if (polished.ok) {
        polished.solution.iters = iter;
        return polished.solution;
      }
    }

    // Residual balancing: drive the penalty toward the regime where primal
    // and dual progress match. The scaled dual is rescaled so the unscaled
    // dual iterate is continuous across the change.
    if (iter < settings.max_iters) {
      double fac = std::sqrt(res.primal / std::max(res.dual, 1e-30));
      if (!std::isfinite(fac)) fac = 1.0;
      fac = std::clamp(fac, 1e-2, 1e2);
      const double rho_new = std::clamp(rho * fac, kRhoMin, kRhoMax);
      if (rho_new > kRhoChangeThreshold * rho ||
          rho_new * kRhoChangeThreshold < rho) {
        const double carry = rho / rho_new;
        for (double& ui : u) ui *= carry;
        rho = rho_new;
        factor.refactor(kSigma, rho);
      }
    }
  }

  unscale_candidate();
  out.status = SolveStatus::MaxIters;
  out.iters = settings.max_iters;
  out.x = cx;
  out.s = cs;
  out.dual = cy;
  out.residuals = unscaled_residuals();
  return out;
}

}  // namespace rcs
