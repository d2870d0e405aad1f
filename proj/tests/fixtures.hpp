#pragma once

#include <string>
#include <vector>

#include "oracles.hpp"
#include "rcs/conic.hpp"
#include "rcs/recovery.hpp"

namespace fixtures {

// Small cone programs with known optima. LP entries carry the vertex-
// enumeration oracle value; SOC entries carry the analytic optimum.
struct ConicFixture {
  std::string name;
  rcs::ConicProblem problem;
  double expected = 0.0;
  bool lp = false;
};

inline std::vector<ConicFixture> conic_fixture_set() {
  using rcs::ConeKind;
  using rcs::ConeSpec;
  using rcs::ConicProblem;
  using rcs::Mat;
  using rcs::Vec;

  std::vector<ConicFixture> set;
  auto add_lp = [&set](std::string name, ConicProblem p) {
    const auto vertex = oracle::lp_enumerate(p);
    set.push_back({std::move(name), std::move(p), vertex.objective, true});
  };
  auto add_soc = [&set](std::string name, ConicProblem p, double expected) {
    set.push_back({std::move(name), std::move(p), expected, false});
  };

  // min x s.t. x >= 1
  add_lp("bound_lp", {Vec{1.0}, Mat(1, 1, {-1.0}), Vec{-1.0}, ConeSpec::nonneg(1)});

  // min x1 + x2 s.t. x1 + 2 x2 = 1, x >= 0
  add_lp("vertex_lp",
         {Vec{1.0, 1.0}, Mat(3, 2, {1.0, 2.0, -1.0, 0.0, 0.0, -1.0}),
          Vec{1.0, 0.0, 0.0},
          ConeSpec::zero(1).append(ConeKind::NonNeg, 2)});

  // min t s.t. ||(3, 4)|| <= t
  add_soc("soc_norm",
          {Vec{1.0}, Mat(3, 1, {-1.0, 0.0, 0.0}), Vec{0.0, 3.0, 4.0},
           ConeSpec::second_order(3)},
          5.0);

  // min -x1 - x2 s.t. x <= (2, 3), x >= 0
  add_lp("box_lp",
         {Vec{-1.0, -1.0},
          Mat(4, 2, {1.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, -1.0}),
          Vec{2.0, 3.0, 0.0, 0.0}, ConeSpec::nonneg(4)});

  // min x1 s.t. x1 + x2 = 2, x1 - x2 = 0
  add_lp("equality_lp",
         {Vec{1.0, 0.0}, Mat(2, 2, {1.0, 1.0, 1.0, -1.0}), Vec{2.0, 0.0},
          ConeSpec::zero(2)});

  // min x1 + 2 x2 + 3 x3 over the unit simplex
  add_lp("simplex_lp",
         {Vec{1.0, 2.0, 3.0},
          Mat(4, 3,
              {1.0, 1.0, 1.0, -1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0}),
          Vec{1.0, 0.0, 0.0, 0.0},
          ConeSpec::zero(1).append(ConeKind::NonNeg, 3)});

  // min x1 s.t. ||x - (1, 1)|| <= 0.5; optimum 1 - 0.5
  add_soc("ball_socp",
          {Vec{1.0, 0.0},
           Mat(3, 2, {0.0, 0.0, -1.0, 0.0, 0.0, -1.0}),
           Vec{0.5, -1.0, -1.0}, ConeSpec::second_order(3)},
          0.5);

  // min t s.t. x = 2, |x| <= t
  add_soc("soc_pinned",
          {Vec{1.0, 0.0},
           Mat(3, 2, {0.0, 1.0, -1.0, 0.0, 0.0, -1.0}),
           Vec{2.0, 0.0, 0.0},
           ConeSpec::zero(1).append(ConeKind::SecondOrder, 2)},
          2.0);

  add_lp("bp_two_col",
         rcs::compile_bp(Mat(1, 2, {1.0, 0.5}), Vec{1.0}).problem);
  add_lp("bp_identity", rcs::compile_bp(Mat::identity(2), Vec{1.0, 0.0}).problem);
  add_lp("ds_soft_threshold",
         rcs::compile_ds(Mat::identity(2), Vec{1.0, 0.2}, 0.5).problem);

  // min max(|theta|, |1 - theta|); optimum 0.5 at theta = 0.5
  add_soc("auo_scalar",
          rcs::compile_auo(Mat(1, 1, {1.0}), Vec{1.0}, 1.0).problem, 0.5);

  return set;
}

}  // namespace fixtures
