#include "rcs/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

namespace rcs {

namespace {

struct MethodOutcome {
  bool ok = false;
  std::size_t false_alarms = 0;
  std::size_t misses = 0;
  std::vector<double> profile;  // filled by run_profile only
};

InstanceConfig apply_sweep(const InstanceConfig& base, SweepVariable variable,
                           std::size_t value) {
  InstanceConfig cell = base;
  if (variable == SweepVariable::K) {
    cell.K = value;
  } else {
    cell.M = value;
  }
  return cell;
}

/// Pulls indices from a shared counter so workers stay busy; every index is
/// processed exactly once and results land in preallocated slots, keeping
/// output independent of the worker count.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

bool usable(const RecoveryResult& result) {
  // A MaxIters iterate is still an estimate; infeasible/unbounded verdicts
  // mean there is no estimate to score.
  return result.solver_status == SolveStatus::Optimal ||
         result.solver_status == SolveStatus::MaxIters;
}

void check_failure_budget(std::size_t failures, std::size_t trials,
                          const std::string& method, const std::string& where) {
  if (failures * 10 > trials) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "method %s at %s: %zu of %zu trials failed (> 10%%)",
                  method.c_str(), where.c_str(), failures, trials);
    throw HarnessError(buf);
  }
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::vector<double> normalized_abs(const Vec& v) {
  std::vector<double> out(v.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::fabs(v[i]);
    peak = std::max(peak, out[i]);
  }
  if (peak > 0.0) {
    for (double& x : out) x /= peak;
  }
  return out;
}

}  // namespace

std::string to_string(SweepVariable v) {
  return v == SweepVariable::K ? "K" : "M";
}

void SweepConfig::validate() const {
  if (trials < 1) throw ParameterError("SweepConfig: trials must be >= 1");
  if (sweep_values.empty()) throw ParameterError("SweepConfig: no sweep values");
  if (methods.empty()) throw ParameterError("SweepConfig: no methods");
  if (!(tau > 0.0 && tau < 1.0)) throw ParameterError("SweepConfig: tau must be in (0, 1)");
  for (std::size_t value : sweep_values) {
    apply_sweep(base, sweep_variable, value).validate();
  }
}

void ProfileConfig::validate() const {
  if (trials < 1) throw ParameterError("ProfileConfig: trials must be >= 1");
  if (methods.empty()) throw ParameterError("ProfileConfig: no methods");
  base.validate();
}

std::pair<std::size_t, std::size_t> rho_terms(const std::vector<std::size_t>& est_support,
                                              const std::vector<std::size_t>& true_support,
                                              std::size_t n) {
  auto as_set = [n](const std::vector<std::size_t>& indices, const char* label) {
    std::vector<std::size_t> s = indices;
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (!s.empty() && s.back() >= n) {
      throw ParameterError(std::string("rho_terms: ") + label + " index out of range");
    }
    return s;
  };
  const std::vector<std::size_t> est = as_set(est_support, "estimated");
  const std::vector<std::size_t> truth = as_set(true_support, "true");
  std::size_t false_alarms = 0;
  for (std::size_t i : est) {
    if (!std::binary_search(truth.begin(), truth.end(), i)) ++false_alarms;
  }
  std::size_t misses = 0;
  for (std::size_t i : truth) {
    if (!std::binary_search(est.begin(), est.end(), i)) ++misses;
  }
  return {false_alarms, misses};
}

RhoReport run_sweep(const SweepConfig& config) {
  config.validate();
  RhoReport report;
  for (std::size_t value : config.sweep_values) {
    const InstanceConfig cell = apply_sweep(config.base, config.sweep_variable, value);
    const std::uint64_t cell_seed = Rng::mix(config.master_seed, value);
    std::vector<std::vector<MethodOutcome>> outcomes(
        config.trials, std::vector<MethodOutcome>(config.methods.size()));

    parallel_for(config.trials, config.threads, [&](std::size_t t) {
      InstanceConfig trial_cfg = cell;
      trial_cfg.seed = Rng::mix(cell_seed, t);
      const MeasurementInstance inst = gen_instance(trial_cfg);
      const std::vector<std::size_t> truth = inst.true_support();
      for (std::size_t j = 0; j < config.methods.size(); ++j) {
        MethodOutcome& out = outcomes[t][j];
        try {
          const RecoveryResult r =
              recover(inst.B, inst.y, config.methods[j], config.solver, config.tau);
          if (!usable(r)) continue;
          const auto [fa, miss] = rho_terms(r.support, truth, trial_cfg.N);
          out.ok = true;
          out.false_alarms = fa;
          out.misses = miss;
        } catch (const Error&) {
          // counted below as a failed trial for this method
        }
      }
    });

    for (std::size_t j = 0; j < config.methods.size(); ++j) {
      std::size_t fa_sum = 0;
      std::size_t miss_sum = 0;
      std::size_t failures = 0;
      std::vector<double> rhos;
      rhos.reserve(config.trials);
      for (std::size_t t = 0; t < config.trials; ++t) {
        const MethodOutcome& out = outcomes[t][j];
        if (!out.ok) {
          ++failures;
          continue;
        }
        fa_sum += out.false_alarms;
        miss_sum += out.misses;
        rhos.push_back(static_cast<double>(out.false_alarms + out.misses));
      }
      check_failure_budget(failures, config.trials, config.methods[j].name(),
                           to_string(config.sweep_variable) + "=" + std::to_string(value));
      const std::size_t used = config.trials - failures;
      RhoReportRow row;
      row.method = config.methods[j].name();
      row.sweep_variable = config.sweep_variable;
      row.sweep_value = value;
      row.N = cell.N;
      row.M = cell.M;
      row.K = cell.K;
      row.delta = cell.delta;
      row.trials = config.trials;
      row.failures = failures;
      row.rho_mean = static_cast<double>(fa_sum + miss_sum) / static_cast<double>(used);
      row.fa_mean = static_cast<double>(fa_sum) / static_cast<double>(used);
      row.miss_mean = static_cast<double>(miss_sum) / static_cast<double>(used);
      if (used >= 2) {
        double ss = 0.0;
        for (double r : rhos) {
          const double d = r - row.rho_mean;
          ss += d * d;
        }
        row.rho_std = std::sqrt(ss / static_cast<double>(used - 1));
      }
      row.seed = config.master_seed;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

ProfileResult run_profile(const ProfileConfig& config) {
  config.validate();
  Rng signal_rng = Rng::derive(config.master_seed, {1});
  const Vec theta = gen_sparse_signal(config.base.N, config.base.K,
                                      config.base.amplitude_mode,
                                      config.base.amplitudes, signal_rng);
  std::vector<std::vector<MethodOutcome>> outcomes(
      config.trials, std::vector<MethodOutcome>(config.methods.size()));

  parallel_for(config.trials, config.threads, [&](std::size_t t) {
    const std::uint64_t trial_seed = Rng::mix(config.master_seed, t);
    Rng matrix_rng = Rng::derive(trial_seed, {2});
    Rng perturb_rng = Rng::derive(trial_seed, {3});
    Mat a = gen_measurement_matrix(config.base.M, config.base.N,
                                   config.base.matrix_mode, matrix_rng);
    Mat v = gen_perturbation(config.base.M, config.base.N, config.base.delta,
                             config.base.delta_semantics, perturb_rng);
    InstanceConfig trial_cfg = config.base;
    trial_cfg.seed = trial_seed;
    const MeasurementInstance inst =
        assemble_instance(theta, std::move(a), std::move(v), trial_cfg);
    for (std::size_t j = 0; j < config.methods.size(); ++j) {
      MethodOutcome& out = outcomes[t][j];
      try {
        const RecoveryResult r =
            recover(inst.B, inst.y, config.methods[j], config.solver);
        if (!usable(r)) continue;
        out.ok = true;
        out.profile = normalized_abs(r.theta_hat);
      } catch (const Error&) {
      }
    }
  });

  ProfileResult result;
  result.true_profile = Vec(normalized_abs(theta));
  for (std::size_t j = 0; j < config.methods.size(); ++j) {
    std::vector<double> sum(config.base.N, 0.0);
    std::size_t failures = 0;
    for (std::size_t t = 0; t < config.trials; ++t) {
      const MethodOutcome& out = outcomes[t][j];
      if (!out.ok) {
        ++failures;
        continue;
      }
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += out.profile[i];
    }
    check_failure_budget(failures, config.trials, config.methods[j].name(), "profile");
    const double used = static_cast<double>(config.trials - failures);
    for (double& x : sum) x /= used;
    ProfileColumn column;
    column.method = config.methods[j].name();
    column.mean_profile = Vec(std::move(sum));
    column.trials = config.trials;
    column.failures = failures;
    result.columns.push_back(std::move(column));
  }
  return result;
}

std::string report_to_csv(const RhoReport& report) {
  std::string out =
      "method,sweep_var,sweep_value,N,M,K,delta,trials,failures,"
      "rho_mean,rho_std,fa_mean,miss_mean,seed\n";
  for (const RhoReportRow& row : report.rows) {
    out += row.method;
    out += ',';
    out += to_string(row.sweep_variable);
    out += ',';
    out += std::to_string(row.sweep_value);
    out += ',';
    out += std::to_string(row.N);
    out += ',';
    out += std::to_string(row.M);
    out += ',';
    out += std::to_string(row.K);
    out += ',';
    out += fmt_double(row.delta);
    out += ',';
    out += std::to_string(row.trials);
    out += ',';
    out += std::to_string(row.failures);
    out += ',';
    out += fmt_double(row.rho_mean);
    out += ',';
    out += fmt_double(row.rho_std);
    out += ',';
    out += fmt_double(row.fa_mean);
    out += ',';
    out += fmt_double(row.miss_mean);
    out += ',';
    out += std::to_string(row.seed);
    out += '\n';
  }
  return out;
}

std::string profile_to_csv(const ProfileResult& result) {
  std::string out = "index,true";
  for (const ProfileColumn& column : result.columns) {
    out += ',';
    out += column.method;
  }
  out += '\n';
  for (std::size_t i = 0; i < result.true_profile.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += fmt_double(result.true_profile[i]);
    for (const ProfileColumn& column : result.columns) {
      out += ',';
      out += fmt_double(column.mean_profile[i]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace rcs
