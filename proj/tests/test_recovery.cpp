#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "rcs/errors.hpp"
#include "rcs/model.hpp"
#include "rcs/recovery.hpp"

using namespace rcs;

TEST_CASE("bp recovers determined and underdetermined systems") {
  {
    const RecoveryResult r = recover(Mat::identity(2), Vec{1.0, 0.0},
                                     RecoveryMethod::bp());
    CHECK(r.solver_status == SolveStatus::Optimal);
    CHECK(r.theta_hat[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::fabs(r.theta_hat[1]) <= 1e-6);
    CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(!r.t_value.has_value());
  }
  {
    const RecoveryResult r = recover(Mat(1, 2, {1.0, 0.5}), Vec{1.0},
                                     RecoveryMethod::bp());
    CHECK(r.theta_hat[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::fabs(r.theta_hat[1]) <= 1e-6);
    CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-6));
  }
  {
    const RecoveryResult r = recover(Mat(1, 2, {1.0, 0.5}), Vec{0.0},
                                     RecoveryMethod::bp());
    CHECK(norm1(r.theta_hat) <= 1e-8);
    CHECK(r.objective <= 1e-8);
    CHECK(r.support == support_detect(r.theta_hat, 0.5));
  }
}

TEST_CASE("bp matches direct solve on a random square system") {
  Rng rng(41);
  Mat b(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      b(i, j) = (i == j ? 2.0 : 0.0) + rng.normal(0.3);
  const Vec theta{0.8, -0.5, 0.3};
  const Vec y = matvec(b, theta);
  const RecoveryResult r = recover(b, y, RecoveryMethod::bp());
  CHECK(r.solver_status == SolveStatus::Optimal);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(r.theta_hat[i] == doctest::Approx(theta[i]).epsilon(1e-6));
  }
}

TEST_CASE("auo 1-d program against grid search") {
  const auto grid = oracle::auo_grid_1d(1.0, 1.0, 1.0);
  CHECK(grid.theta == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(grid.value == doctest::Approx(0.5).epsilon(1e-9));

  const RecoveryResult r = recover(Mat(1, 1, {1.0}), Vec{1.0},
                                   RecoveryMethod::auo(1.0));
  CHECK(r.solver_status == SolveStatus::Optimal);
  REQUIRE(r.t_value.has_value());
  CHECK(std::fabs(r.theta_hat[0] - grid.theta) <= 1e-4);
  CHECK(std::fabs(*r.t_value - grid.value) <= 1e-4);
}

TEST_CASE("auo degenerate and extreme delta") {
  {
    const RecoveryResult r = recover(Mat(1, 2, {1.0, 0.5}), Vec{0.0},
                                     RecoveryMethod::auo(0.5));
    CHECK(norm1(r.theta_hat) <= 1e-6);
    REQUIRE(r.t_value.has_value());
    CHECK(*r.t_value <= 1e-6);
  }
  {
    const RecoveryResult r = recover(Mat(1, 1, {1.0}), Vec{1.0},
                                     RecoveryMethod::auo(1e6));
    CHECK(norm2(r.theta_hat) <= 1e-3);
  }
}

TEST_CASE("auo feasibility and epigraph identity at the optimum") {
  Rng master(53);
  for (int trial = 0; trial < 20; ++trial) {
    InstanceConfig cfg;
    cfg.N = 12;
    cfg.M = 6;
    cfg.K = 2;
    cfg.delta = 0.4;
    cfg.seed = master.next();
    const MeasurementInstance inst = gen_instance(cfg);
    const double delta = cfg.delta;
    const RecoveryResult r = recover(inst.B, inst.y, RecoveryMethod::auo(delta));
    if (r.solver_status != SolveStatus::Optimal) continue;
    REQUIRE(r.t_value.has_value());
    const double t = *r.t_value;
    const double sqrt_m_delta = std::sqrt(static_cast<double>(cfg.M)) * delta;
    const double resid = norm2(sub(inst.y, matvec(inst.B, r.theta_hat)));
    CHECK(norm1(r.theta_hat) <= t + 1e-5);
    CHECK(resid <= sqrt_m_delta * t + 1e-5);
    const double lower = std::max(norm1(r.theta_hat), resid / sqrt_m_delta);
    CHECK(std::fabs(t - lower) <= 1e-5);
    CHECK(r.objective == doctest::Approx(lower).epsilon(1e-9));
  }
}

TEST_CASE("ds worked cases") {
  {
    // lambda = 0 forces the normal equations
    Mat b(2, 2, {2.0, 1.0, 1.0, 3.0});
    const Vec theta{0.3, -0.2};
    const Vec y = matvec(b, theta);
    const RecoveryResult r = recover(b, y, RecoveryMethod::ds(0.0));
    CHECK(r.solver_status == SolveStatus::Optimal);
    CHECK(r.theta_hat[0] == doctest::Approx(0.3).epsilon(1e-5));
    CHECK(r.theta_hat[1] == doctest::Approx(-0.2).epsilon(1e-5));
  }
  {
    // lambda >= ||B'y||_inf admits zero
    const Mat b = Mat::identity(2);
    const Vec y{0.4, -0.3};
    const RecoveryResult r = recover(b, y, RecoveryMethod::ds(0.5));
    CHECK(norm1(r.theta_hat) <= 1e-6);
    CHECK(r.objective <= 1e-6);
  }
  {
    // soft-threshold behavior on the identity
    const RecoveryResult r = recover(Mat::identity(2), Vec{1.0, 0.2},
                                     RecoveryMethod::ds(0.5));
    CHECK(r.theta_hat[0] == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(std::fabs(r.theta_hat[1]) <= 1e-5);
    CHECK(r.objective == doctest::Approx(0.5).epsilon(1e-5));
  }
  {
    // rectangular dictionary, lambda = 0 pins the unique consistent point
    Mat b(3, 2, {1.0, 0.0, 0.0, 1.0, 1.0, 1.0});
    const Vec y = matvec(b, Vec{0.4, -0.1});
    const RecoveryResult r = recover(b, y, RecoveryMethod::ds(0.0));
    CHECK(r.solver_status == SolveStatus::Optimal);
    CHECK(r.theta_hat[0] == doctest::Approx(0.4).epsilon(1e-5));
    CHECK(r.theta_hat[1] == doctest::Approx(-0.1).epsilon(1e-5));
  }
}

TEST_CASE("decompile extracts the split variables") {
  const Mat b = Mat::identity(2);
  const Vec y{1.0, 0.0};
  const CompiledProgram prog = compile_bp(b, y);
  ConicSolution sol;
  sol.x = Vec{1.0, 0.0, 0.0, 0.0};  // p = [1, 0], q = [0, 0]
  sol.status = SolveStatus::Optimal;
  const RecoveryResult r = decompile(prog, sol);
  CHECK(r.theta_hat == Vec{1.0, 0.0});
  CHECK(r.objective == 1.0);

  ConicSolution cancel;
  cancel.x = Vec{1.0, 1.0, 1.0, 1.0};  // p = q -> theta = 0
  cancel.status = SolveStatus::Optimal;
  const RecoveryResult rc = decompile(prog, cancel);
  CHECK(rc.theta_hat == Vec{0.0, 0.0});
  CHECK(rc.objective == 0.0);

  const CompiledProgram auo = compile_auo(b, y, 1.0);
  ConicSolution with_t;
  with_t.x = Vec{0.25, 0.0, 0.0, 0.0, 0.5};
  with_t.status = SolveStatus::Optimal;
  const RecoveryResult ra = decompile(auo, with_t);
  REQUIRE(ra.t_value.has_value());
  CHECK(*ra.t_value == 0.5);

  ConicSolution wrong;
  wrong.x = Vec{1.0};
  CHECK_THROWS_AS(decompile(prog, wrong), DimensionError);
}

TEST_CASE("omp worked cases") {
  {
    OmpStop stop;
    stop.sparsity = 1;
    const RecoveryResult r = omp(Mat::identity(2), Vec{0.0, 3.0}, stop);
    CHECK(r.support == std::vector<std::size_t>{1});
    CHECK(r.theta_hat == Vec{0.0, 3.0});
  }
  {
    OmpStop stop;
    stop.residual_tol = 1e-9;
    const RecoveryResult r = omp(Mat::identity(2), Vec{0.0, 0.0}, stop);
    CHECK(r.support.empty());
    CHECK(norm1(r.theta_hat) == 0.0);
  }
  {
    const double s = 1.0 / std::sqrt(2.0);
    Mat b(2, 3, {1.0, 0.0, s, 0.0, 1.0, s});
    const Vec y = matvec(b, Vec{0.0, 0.0, 2.0});
    OmpStop stop;
    stop.sparsity = 1;
    const RecoveryResult r = omp(b, y, stop);
    CHECK(r.support == std::vector<std::size_t>{2});
  }
}

TEST_CASE("omp exactness on orthonormal dictionaries") {
  Rng rng(61);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t m = 10, n = 6, k = 3;
    const Mat b = oracle::orthonormal_columns(m, n, rng);
    Vec theta(n);
    const auto support = rng.sample_without_replacement(n, k);
    for (std::size_t idx : support) theta[idx] = rng.normal(1.0) + 2.0;
    const Vec y = matvec(b, theta);
    OmpStop stop;
    stop.sparsity = k;
    const RecoveryResult r = omp(b, y, stop);
    std::vector<std::size_t> expect(support);
    std::sort(expect.begin(), expect.end());
    std::vector<std::size_t> got;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::fabs(r.theta_hat[i]) > 1e-8) got.push_back(i);
    }
    CHECK(got == expect);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::fabs(r.theta_hat[i] - theta[i]) <= 1e-10);
    }
  }
}

TEST_CASE("omp stop rules and errors") {
  OmpStop none;
  CHECK_THROWS_AS(omp(Mat::identity(2), Vec{1.0, 0.0}, none), ParameterError);

  OmpStop too_deep;
  too_deep.sparsity = 3;
  CHECK_THROWS_AS(omp(Mat::identity(2), Vec{1.0, 0.0}, too_deep), ParameterError);

  OmpStop stop;
  stop.sparsity = 2;
  CHECK_THROWS_AS(omp(Mat(2, 2, {1.0, 1.0, 0.0, 0.0}), Vec{1.0, 1.0}, stop),
                  DictionaryError);

  OmpStop zero_col;
  zero_col.sparsity = 1;
  CHECK_THROWS_AS(omp(Mat(2, 2, {1.0, 0.0, 0.0, 0.0}), Vec{1.0, 0.0}, zero_col),
                  ParameterError);
}

TEST_CASE("auc bound") {
  {
    const AucBound b = auc_bound(Mat(2, 2), Vec{3.0, -1.0}, 0.5);
    CHECK(b.lhs == 0.0);
    CHECK(b.holds);
  }
  {
    // aligned signs make the chain tight
    const AucBound b = auc_bound(Mat(1, 2, {0.7, 0.7}), Vec{1.0, 1.0}, 0.7);
    CHECK(b.lhs == 1.4);
    CHECK(b.rhs == 1.4);
    CHECK(b.holds);
  }
  {
    Rng rng(67);
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t m = 1 + rng.below(4);
      const std::size_t n = 1 + rng.below(5);
      const double delta = 0.3 + rng.uniform01();
      const DeltaSemantics semantics =
          trial % 2 == 0 ? DeltaSemantics::Elementwise : DeltaSemantics::RowL1;
      Rng stream(rng.next());
      const Mat v = gen_perturbation(m, n, delta, semantics, stream);
      Vec theta(n);
      for (std::size_t i = 0; i < n; ++i) theta[i] = stream.normal(1.5);
      const AucBound b = auc_bound(v, theta, delta);
      CHECK(b.holds);
      CHECK(b.lhs <= b.rhs);
    }
  }
  CHECK_THROWS_AS(auc_bound(Mat(1, 2, {0.1, 0.1}), Vec{1.0}, 0.5), DimensionError);
}

TEST_CASE("inequality chain behind the bound") {
  Rng rng(71);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t m = 1 + rng.below(4);
    const std::size_t n = 1 + rng.below(5);
    Mat v(m, n);
    Vec theta(n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) v(i, j) = rng.normal(1.0);
    for (std::size_t j = 0; j < n; ++j) theta[j] = rng.normal(1.0);

    const Vec vt = matvec(v, theta);
    double sq = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      Vec row(n);
      for (std::size_t j = 0; j < n; ++j) row[j] = v(i, j);
      const double inner = std::fabs(dot(row, theta));
      CHECK(inner <= norm1(row) * norm1(theta) * (1.0 + 1e-12));
      sq += inner * inner;
    }
    CHECK(norm2(vt) == doctest::Approx(std::sqrt(sq)).epsilon(1e-12));
    CHECK(norm2(vt) <= std::sqrt(static_cast<double>(m)) * mat_inf_norm(v) *
                           norm1(theta) * (1.0 + 1e-12));
  }
}

TEST_CASE("support detection") {
  CHECK(support_detect(Vec{1.0, 0.6, 0.1}, 0.5) ==
        std::vector<std::size_t>{0, 1});
  CHECK(support_detect(Vec{0.0, 0.0}, 0.5).empty());
  CHECK(support_detect(Vec{-2.0, 0.0, 0.0}, 0.5) == std::vector<std::size_t>{0});
  CHECK_THROWS_AS(support_detect(Vec{1.0}, 0.0), ParameterError);
  CHECK_THROWS_AS(support_detect(Vec{1.0}, 1.0), ParameterError);
}

TEST_CASE("result support honors the tau argument") {
  const RecoveryResult r = recover(Mat::identity(3), Vec{1.0, 0.6, 0.1},
                                   RecoveryMethod::bp(), {}, 0.5);
  CHECK(r.support == support_detect(r.theta_hat, 0.5));
  CHECK(r.support == std::vector<std::size_t>{0, 1});
  const RecoveryResult tight = recover(Mat::identity(3), Vec{1.0, 0.6, 0.1},
                                       RecoveryMethod::bp(), {}, 0.9);
  CHECK(tight.support == std::vector<std::size_t>{0});
}

TEST_CASE("method construction guards") {
  CHECK_THROWS_AS(RecoveryMethod::auo(-0.1), ParameterError);
  CHECK_THROWS_AS(RecoveryMethod::ds(-1.0), ParameterError);
  CHECK_THROWS_AS(RecoveryMethod::omp_sparsity(0), ParameterError);
  CHECK_THROWS_AS(compile_auo(Mat(1, 1, {1.0}), Vec{1.0}, 0.0), ParameterError);
  CHECK(std::string(RecoveryMethod::bp().name()) == "bp");
  CHECK(std::string(RecoveryMethod::auo(0.5).name()) == "auo");
  CHECK(std::string(RecoveryMethod::ds(0.5).name()) == "ds");
  CHECK(std::string(RecoveryMethod::omp_sparsity(2).name()) == "omp");
}

TEST_CASE("delta to zero approaches bp") {
  Rng master(79);
  for (int trial = 0; trial < 5; ++trial) {
    InstanceConfig cfg;
    cfg.N = 20;
    cfg.M = 10;
    cfg.K = 3;
    cfg.delta = 0.0;
    cfg.matrix_mode = MatrixMode::Gaussian;
    cfg.seed = master.next();
    const MeasurementInstance inst = gen_instance(cfg);
    const RecoveryResult bp = recover(inst.B, inst.y, RecoveryMethod::bp());
    const RecoveryResult auo = recover(inst.B, inst.y, RecoveryMethod::auo(1e-8));
    REQUIRE(bp.solver_status == SolveStatus::Optimal);
    REQUIRE(auo.solver_status == SolveStatus::Optimal);
    const double rel = std::fabs(norm1(auo.theta_hat) - bp.objective) /
                       std::max(1.0, bp.objective);
    CHECK(rel <= 1e-4);
  }
}
