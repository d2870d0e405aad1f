#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rcs/model.hpp"
#include "rcs/recovery.hpp"

namespace rcs {

enum class SweepVariable { K, M };

std::string to_string(SweepVariable v);

/// One Monte Carlo sweep: for each sweep value, `trials` paired trials in
/// which every method sees the identical instance. Trial t of sweep value v
/// draws its instance from seed mix(mix(master_seed, v), t), so results are
/// independent of execution order and worker count.
struct SweepConfig {
  InstanceConfig base;
  SweepVariable sweep_variable = SweepVariable::K;
  std::vector<std::size_t> sweep_values;
  std::vector<RecoveryMethod> methods;
  std::size_t trials = 1;
  double tau = 0.5;
  std::uint64_t master_seed = 0;
  std::size_t threads = 1;
  SolverSettings solver;

  void validate() const;
};

/// One (method, sweep value) cell. `trials` is the configured count;
/// `failures` of them were excluded from the means. rho_mean, fa_mean and
/// miss_mean are single roundings of exact integer sums over the included
/// trials; rho_std is the sample standard deviation (n - 1), zero when
/// fewer than two trials are included.
struct RhoReportRow {
  std::string method;
  SweepVariable sweep_variable = SweepVariable::K;
  std::size_t sweep_value = 0;
  std::size_t N = 0;
  std::size_t M = 0;
  std::size_t K = 0;
  double delta = 0.0;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double rho_mean = 0.0;
  double rho_std = 0.0;
  double fa_mean = 0.0;
  double miss_mean = 0.0;
  std::uint64_t seed = 0;
};

struct RhoReport {
  std::vector<RhoReportRow> rows;
};

/// Fixed-support averaged recovery profiles: the true support is drawn once
/// from master_seed and held across trials; A and V are redrawn per trial.
struct ProfileConfig {
  InstanceConfig base;
  std::vector<RecoveryMethod> methods;
  std::size_t trials = 1;
  std::uint64_t master_seed = 0;
  std::size_t threads = 1;
  SolverSettings solver;

  void validate() const;
};

struct ProfileColumn {
  std::string method;
  Vec mean_profile;  // average over included trials of |theta_hat| / max|theta_hat|
  std::size_t trials = 0;
  std::size_t failures = 0;
};

struct ProfileResult {
  Vec true_profile;  // |theta_true| / max|theta_true|
  std::vector<ProfileColumn> columns;
};

/// Support-error counts: false alarms |est \ true| and misses |true \ est|.
/// Indices are 0-based and must lie in [0, n).
std::pair<std::size_t, std::size_t> rho_terms(const std::vector<std::size_t>& est_support,
                                              const std::vector<std::size_t>& true_support,
                                              std::size_t n);

RhoReport run_sweep(const SweepConfig& config);
ProfileResult run_profile(const ProfileConfig& config);

/// CSV emission. Decimals use %.12g; files end with a trailing newline.
std::string report_to_csv(const RhoReport& report);
std::string profile_to_csv(const ProfileResult& result);

}  // namespace rcs
