#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rcs/linalg.hpp"

namespace rcs {

enum class ConeKind { Zero, NonNeg, SecondOrder };

struct ConeBlock {
  ConeKind kind;
  std::size_t dim;  // SecondOrder(d) is {(t, x) : ||x||_2 <= t, x in R^{d-1}}
};

/// Ordered product of zero, nonnegative, and second-order cones.
class ConeSpec {
 public:
  ConeSpec() = default;
  explicit ConeSpec(std::vector<ConeBlock> blocks);

  static ConeSpec zero(std::size_t dim);
  static ConeSpec nonneg(std::size_t dim);
  static ConeSpec second_order(std::size_t dim);

  ConeSpec& append(ConeKind kind, std::size_t dim);
  const std::vector<ConeBlock>& blocks() const { return blocks_; }
  std::size_t total_dim() const { return total_dim_; }

 private:
  std::vector<ConeBlock> blocks_;
  std::size_t total_dim_ = 0;
};

/// Euclidean projection onto the cone product, blockwise.
Vec project_cone(const Vec& point, const ConeSpec& cones);

/// min c'x  s.t.  Ax + s = b, s in K.
struct ConicProblem {
  Vec c;
  Mat A;
  Vec b;
  ConeSpec cones;

  std::size_t num_vars() const { return c.size(); }
  std::size_t num_rows() const { return b.size(); }
  void validate() const;
};

struct SolverSettings {
  double eps_primal = 1e-6;
  double eps_dual = 1e-6;
  double eps_gap = 1e-6;
  std::size_t max_iters = 50000;
  double over_relaxation = 1.5;  // in (0, 2)
  std::uint64_t seed = 0;
  std::string trace_path;  // when set, per-iteration CSV trace is written

  void validate() const;
};

enum class SolveStatus { Optimal, MaxIters, Infeasible, Unbounded };

std::string to_string(SolveStatus status);

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};

struct ConicSolution {
  Vec x;
  Vec s;
  Vec dual;
  SolveStatus status = SolveStatus::MaxIters;
  std::size_t iters = 0;
  Residuals residuals;
};

/// Operator-splitting solve: alternates a linear solve against a
/// once-factorized KKT-style matrix, a cone projection, and a dual update.
/// Deterministic for fixed inputs and settings. Optimal is reported only
/// when all three recomputed residuals meet their tolerances.
ConicSolution solve_conic(const ConicProblem& problem,
                          const SolverSettings& settings = {});

/// Recomputes the three normalized residuals from scratch:
///   primal ||Ax + s - b|| / (1 + ||b||),
///   dual   ||A'y + c|| / (1 + ||c||),
///   gap    |c'x + b'y| / (1 + |c'x| + |b'y|).
Residuals residuals(const ConicProblem& problem, const ConicSolution& solution);

}  // namespace rcs
