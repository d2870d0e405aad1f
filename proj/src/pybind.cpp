// Python surface: instance generation, the four recovery methods, the
// perturbation bound, and the Monte Carlo harness as CSV. Matrices cross the
// boundary as nested lists, which is plenty at the problem sizes this
// library targets.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rcs/bench.hpp"
#include "rcs/errors.hpp"
#include "rcs/linalg.hpp"
#include "rcs/model.hpp"
#include "rcs/recovery.hpp"

namespace py = pybind11;

namespace {

rcs::Vec to_vec(const std::vector<double>& values) {
  return rcs::Vec(values);
}

rcs::Mat to_mat(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw rcs::DimensionError("matrix needs at least one row");
  const std::size_t cols = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * cols);
  for (const auto& row : rows) {
    if (row.size() != cols) {
      throw rcs::DimensionError("matrix rows have unequal lengths");
    }
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return rcs::Mat(rows.size(), cols, std::move(flat));
}

std::vector<std::vector<double>> from_mat(const rcs::Mat& m) {
  std::vector<std::vector<double>> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out[i].assign(m.row_ptr(i), m.row_ptr(i) + m.cols());
  }
  return out;
}

rcs::InstanceConfig make_config(std::size_t n, std::size_t m, std::size_t k,
                                double delta, const std::string& semantics,
                                const std::string& mode, std::uint64_t seed) {
  rcs::InstanceConfig cfg;
  cfg.N = n;
  cfg.M = m;
  cfg.K = k;
  cfg.delta = delta;
  cfg.delta_semantics = rcs::delta_semantics_from_string(semantics);
  cfg.matrix_mode = rcs::matrix_mode_from_string(mode);
  cfg.seed = seed;
  return cfg;
}

rcs::SolverSettings make_settings(double tol, std::size_t max_iters) {
  rcs::SolverSettings settings;
  settings.eps_primal = tol;
  settings.eps_dual = tol;
  settings.eps_gap = tol;
  settings.max_iters = max_iters;
  return settings;
}

rcs::RecoveryMethod make_method(const std::string& name,
                                std::optional<double> delta,
                                std::optional<double> lam,
                                std::optional<std::size_t> sparsity,
                                std::optional<double> residual_tol) {
  if (name == "bp") return rcs::RecoveryMethod::bp();
  if (name == "auo") {
    if (!delta || *delta <= 0.0) {
      throw rcs::ParameterError("method auo needs a positive delta");
    }
    return rcs::RecoveryMethod::auo(*delta);
  }
  if (name == "ds") {
    if (!lam) throw rcs::ParameterError("method ds needs lam");
    return rcs::RecoveryMethod::ds(*lam);
  }
  if (name == "omp") {
    if (sparsity) return rcs::RecoveryMethod::omp_sparsity(*sparsity);
    if (residual_tol) return rcs::RecoveryMethod::omp_residual(*residual_tol);
    throw rcs::ParameterError("method omp needs sparsity or residual_tol");
  }
  throw rcs::ParameterError("unknown method '" + name + "'");
}

// Mirrors the command line: auo falls back to the generator delta when no
// solver_delta is given; ds and omp insist on their parameters.
std::vector<rcs::RecoveryMethod> make_methods(
    const std::vector<std::string>& names, double gen_delta,
    std::optional<double> solver_delta, std::optional<double> lam,
    std::optional<std::size_t> sparsity) {
  if (names.empty()) throw rcs::ParameterError("methods list is empty");
  std::vector<rcs::RecoveryMethod> out;
  out.reserve(names.size());
  for (const std::string& name : names) {
    const std::optional<double> auo_delta =
        solver_delta ? solver_delta : std::optional<double>(gen_delta);
    out.push_back(make_method(name, auo_delta, lam, sparsity, std::nullopt));
  }
  return out;
}

rcs::SweepVariable sweep_from_string(const std::string& name) {
  if (name == "K") return rcs::SweepVariable::K;
  if (name == "M") return rcs::SweepVariable::M;
  throw rcs::ParameterError("sweep must be 'K' or 'M'");
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "sparse recovery under bounded measurement-matrix perturbation";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const rcs::ParameterError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const rcs::DimensionError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const rcs::ParseError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<rcs::MeasurementInstance>(mod, "Instance")
      .def_property_readonly(
          "theta_true",
          [](const rcs::MeasurementInstance& inst) {
            return inst.theta_true.data();
          })
      .def_property_readonly(
          "A",
          [](const rcs::MeasurementInstance& inst) { return from_mat(inst.A); })
      .def_property_readonly(
          "V",
          [](const rcs::MeasurementInstance& inst) { return from_mat(inst.V); })
      .def_property_readonly(
          "B",
          [](const rcs::MeasurementInstance& inst) { return from_mat(inst.B); })
      .def_property_readonly(
          "y", [](const rcs::MeasurementInstance& inst) { return inst.y.data(); })
      .def_property_readonly(
          "n", [](const rcs::MeasurementInstance& inst) { return inst.config.N; })
      .def_property_readonly(
          "m", [](const rcs::MeasurementInstance& inst) { return inst.config.M; })
      .def_property_readonly(
          "k", [](const rcs::MeasurementInstance& inst) { return inst.config.K; })
      .def_property_readonly("delta",
                             [](const rcs::MeasurementInstance& inst) {
                               return inst.config.delta;
                             })
      .def_property_readonly("delta_semantics",
                             [](const rcs::MeasurementInstance& inst) {
                               return rcs::to_string(inst.config.delta_semantics);
                             })
      .def_property_readonly("matrix_mode",
                             [](const rcs::MeasurementInstance& inst) {
                               return rcs::to_string(inst.config.matrix_mode);
                             })
      .def_property_readonly("seed",
                             [](const rcs::MeasurementInstance& inst) {
                               return inst.config.seed;
                             })
      .def("true_support", &rcs::MeasurementInstance::true_support)
      .def("__repr__", [](const rcs::MeasurementInstance& inst) {
        return "Instance(n=" + std::to_string(inst.config.N) +
               ", m=" + std::to_string(inst.config.M) +
               ", k=" + std::to_string(inst.config.K) + ")";
      });

  py::class_<rcs::RecoveryResult>(mod, "Result")
      .def_property_readonly(
          "theta_hat",
          [](const rcs::RecoveryResult& r) { return r.theta_hat.data(); })
      .def_property_readonly(
          "t", [](const rcs::RecoveryResult& r) { return r.t_value; })
      .def_readonly("objective", &rcs::RecoveryResult::objective)
      .def_property_readonly("status",
                             [](const rcs::RecoveryResult& r) {
                               return rcs::to_string(r.solver_status);
                             })
      .def_readonly("iters", &rcs::RecoveryResult::iters)
      .def_readonly("support", &rcs::RecoveryResult::support)
      .def("__repr__", [](const rcs::RecoveryResult& r) {
        return "Result(status=" + rcs::to_string(r.solver_status) +
               ", objective=" + std::to_string(r.objective) + ")";
      });

  mod.def(
      "gen_instance",
      [](std::size_t n, std::size_t m, std::size_t k, double delta,
         const std::string& delta_semantics, const std::string& matrix_mode,
         std::uint64_t seed) {
        return rcs::gen_instance(
            make_config(n, m, k, delta, delta_semantics, matrix_mode, seed));
      },
      py::arg("n"), py::arg("m"), py::arg("k"), py::arg("delta"),
      py::arg("delta_semantics") = "elementwise",
      py::arg("matrix_mode") = "subsampled_identity", py::arg("seed") = 0,
      "Draw a seeded instance: sparse theta, matrix A, perturbation V "
      "bounded by delta, B = A + V, and y = A theta.");

  mod.def("save_instance",
          [](const std::string& path, const rcs::MeasurementInstance& inst) {
            rcs::write_instance(path, inst);
          },
          py::arg("path"), py::arg("instance"));

  mod.def("load_instance", &rcs::read_instance, py::arg("path"));

  mod.def(
      "recover",
      [](const std::vector<std::vector<double>>& B,
         const std::vector<double>& y, const std::string& method,
         std::optional<double> delta, std::optional<double> lam,
         std::optional<std::size_t> sparsity,
         std::optional<double> residual_tol, double tau, double tol,
         std::size_t max_iters) {
        return rcs::recover(to_mat(B), to_vec(y),
                            make_method(method, delta, lam, sparsity,
                                        residual_tol),
                            make_settings(tol, max_iters), tau);
      },
      py::arg("B"), py::arg("y"), py::arg("method"), py::kw_only(),
      py::arg("delta") = std::nullopt, py::arg("lam") = std::nullopt,
      py::arg("sparsity") = std::nullopt,
      py::arg("residual_tol") = std::nullopt, py::arg("tau") = 0.5,
      py::arg("tol") = 1e-6, py::arg("max_iters") = 50000,
      "Run one recovery method ('bp', 'auo', 'ds', or 'omp') on (B, y).");

  mod.def(
      "auc_bound",
      [](const std::vector<std::vector<double>>& V,
         const std::vector<double>& theta, double delta) {
        const rcs::AucBound b = rcs::auc_bound(to_mat(V), to_vec(theta), delta);
        return py::make_tuple(b.lhs, b.rhs, b.holds);
      },
      py::arg("V"), py::arg("theta"), py::arg("delta"),
      "Returns (|V theta|_2, sqrt(M) delta |theta|_1, holds).");

  mod.def(
      "support_detect",
      [](const std::vector<double>& theta, double tau) {
        return rcs::support_detect(to_vec(theta), tau);
      },
      py::arg("theta"), py::arg("tau") = 0.5);

  mod.def(
      "sweep_csv",
      [](std::size_t n, std::size_t m, std::size_t k, double delta,
         const std::string& sweep, const std::vector<std::size_t>& values,
         const std::vector<std::string>& methods, std::size_t trials,
         double tau, std::uint64_t seed, std::size_t threads,
         const std::string& delta_semantics, const std::string& matrix_mode,
         std::optional<double> solver_delta, std::optional<double> lam,
         std::optional<std::size_t> sparsity, double tol,
         std::size_t max_iters) {
        rcs::SweepConfig cfg;
        cfg.base = make_config(n, m, k, delta, delta_semantics, matrix_mode, 0);
        cfg.sweep_variable = sweep_from_string(sweep);
        cfg.sweep_values = values;
        cfg.methods = make_methods(methods, delta, solver_delta, lam, sparsity);
        cfg.trials = trials;
        cfg.tau = tau;
        cfg.master_seed = seed;
        cfg.threads = threads;
        cfg.solver = make_settings(tol, max_iters);
        return rcs::report_to_csv(rcs::run_sweep(cfg));
      },
      py::arg("n"), py::arg("m"), py::arg("k"), py::arg("delta"),
      py::arg("sweep"), py::arg("values"), py::kw_only(),
      py::arg("methods") = std::vector<std::string>{"bp", "auo"},
      py::arg("trials") = 100, py::arg("tau") = 0.5, py::arg("seed") = 0,
      py::arg("threads") = 1, py::arg("delta_semantics") = "elementwise",
      py::arg("matrix_mode") = "subsampled_identity",
      py::arg("solver_delta") = std::nullopt, py::arg("lam") = std::nullopt,
      py::arg("sparsity") = std::nullopt, py::arg("tol") = 1e-6,
      py::arg("max_iters") = 50000,
      "Paired Monte Carlo sweep over K or M; returns the report CSV.");

  mod.def(
      "profile_csv",
      [](std::size_t n, std::size_t m, std::size_t k, double delta,
         const std::vector<std::string>& methods, std::size_t trials,
         std::uint64_t seed, std::size_t threads,
         const std::string& delta_semantics, const std::string& matrix_mode,
         std::optional<double> solver_delta, std::optional<double> lam,
         std::optional<std::size_t> sparsity, double tol,
         std::size_t max_iters) {
        rcs::ProfileConfig cfg;
        cfg.base = make_config(n, m, k, delta, delta_semantics, matrix_mode, 0);
        cfg.methods = make_methods(methods, delta, solver_delta, lam, sparsity);
        cfg.trials = trials;
        cfg.master_seed = seed;
        cfg.threads = threads;
        cfg.solver = make_settings(tol, max_iters);
        return rcs::profile_to_csv(rcs::run_profile(cfg));
      },
      py::arg("n"), py::arg("m"), py::arg("k"), py::arg("delta"),
      py::kw_only(),
      py::arg("methods") = std::vector<std::string>{"bp", "auo"},
      py::arg("trials") = 50, py::arg("seed") = 0, py::arg("threads") = 1,
      py::arg("delta_semantics") = "elementwise",
      py::arg("matrix_mode") = "subsampled_identity",
      py::arg("solver_delta") = std::nullopt, py::arg("lam") = std::nullopt,
      py::arg("sparsity") = std::nullopt, py::arg("tol") = 1e-6,
      py::arg("max_iters") = 50000,
      "Fixed-support averaged recovery profiles; returns the profile CSV.");
}
