#pragma once

#include <optional>
#include <vector>

#include "rcs/conic.hpp"
#include "rcs/linalg.hpp"

namespace rcs {

/// Menu of recovery methods. BP solves min ||theta||_1 s.t. y = B theta;
/// AUO solves min t s.t. ||y - B theta||_2 <= sqrt(M) delta t, ||theta||_1 <= t;
/// DS solves min ||theta||_1 s.t. ||B'(y - B theta)||_inf <= lambda;
/// OMP is the greedy baseline with a sparsity or residual-tolerance stop.
struct RecoveryMethod {
  enum class Kind { BP, AUO, DS, OMP };

  Kind kind = Kind::BP;
  double delta = 0.0;    // AUO
  double lambda = 0.0;   // DS
  std::optional<std::size_t> sparsity;     // OMP
  std::optional<double> residual_tol;      // OMP

  static RecoveryMethod bp();
  static RecoveryMethod auo(double delta);
  static RecoveryMethod ds(double lambda);
  static RecoveryMethod omp_sparsity(std::size_t k);
  static RecoveryMethod omp_residual(double tol);

  const char* name() const;
};

struct RecoveryResult {
  Vec theta_hat;
  std::optional<double> t_value;  // AUO epigraph variable
  double objective = 0.0;         // recomputed from theta_hat, never trusted
  SolveStatus solver_status = SolveStatus::Optimal;
  std::size_t iters = 0;
  std::vector<std::size_t> support;  // 0-based indices
};

/// A compiled cone program together with the record needed to decompile
/// its solution (method kind, dimensions, and the instance data used to
/// recompute objectives).
struct CompiledProgram {
  ConicProblem problem;
  RecoveryMethod::Kind kind = RecoveryMethod::Kind::BP;
  std::size_t signal_dim = 0;
  Mat B;
  Vec y;
  double sqrt_m_delta = 0.0;  // AUO only
};

// Variables are the positive/negative split (p, q) with theta = p - q;
// AUO appends the epigraph scalar t.
CompiledProgram compile_bp(const Mat& B, const Vec& y);
CompiledProgram compile_auo(const Mat& B, const Vec& y, double delta);
CompiledProgram compile_ds(const Mat& B, const Vec& y, double lambda);

/// Extracts theta (and t for AUO) from a solve of the compiled problem and
/// recomputes the objective from theta. `tau` drives support detection.
RecoveryResult decompile(const CompiledProgram& program,
                         const ConicSolution& solution, double tau = 0.5);

struct OmpStop {
  std::optional<std::size_t> sparsity;
  std::optional<double> residual_tol;
};

RecoveryResult omp(const Mat& B, const Vec& y, const OmpStop& stop,
                   double tau = 0.5);

struct AucBound {
  double lhs = 0.0;  // ||V theta||_2
  double rhs = 0.0;  // sqrt(M) delta ||theta||_1
  bool holds = false;
};

AucBound auc_bound(const Mat& V, const Vec& theta, double delta);

/// Indices i with |theta_i| >= tau * max_j |theta_j|; empty for theta = 0.
std::vector<std::size_t> support_detect(const Vec& theta, double tau);

/// One-call recovery: compile, solve, decompile (or run OMP directly).
RecoveryResult recover(const Mat& B, const Vec& y, const RecoveryMethod& method,
                       const SolverSettings& settings = {}, double tau = 0.5);

}  // namespace rcs
