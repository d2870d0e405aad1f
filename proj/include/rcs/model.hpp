#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rcs/linalg.hpp"

namespace rcs {

/// Deterministic random stream: a SplitMix64 hash chain derives child seeds
/// from (master seed, path of ids), and mt19937_64 — bit-exact across
/// standard library implementations — generates the stream. Distribution
/// transforms are implemented here (53-bit uniforms, Box-Muller normals)
/// so draws do not depend on implementation-defined library behavior.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  static std::uint64_t mix(std::uint64_t h, std::uint64_t v);
  static Rng derive(std::uint64_t master, std::initializer_list<std::uint64_t> path);

  std::uint64_t next() { return engine_(); }
  double uniform01();                       // [0, 1)
  double normal(double sigma);              // Box-Muller, two uniforms per draw
  std::uint64_t below(std::uint64_t n);     // unbiased integer in [0, n)
  /// k distinct indices from [0, n), in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

enum class DeltaSemantics { Elementwise, RowL1 };
enum class MatrixMode { SubsampledIdentity, Gaussian };
enum class AmplitudeMode { UnitOnes, Custom };

std::string to_string(DeltaSemantics s);
std::string to_string(MatrixMode m);
DeltaSemantics delta_semantics_from_string(const std::string& s);
MatrixMode matrix_mode_from_string(const std::string& s);

struct InstanceConfig {
  std::size_t N = 0;
  std::size_t M = 0;
  std::size_t K = 0;
  double delta = 0.0;
  DeltaSemantics delta_semantics = DeltaSemantics::Elementwise;
  AmplitudeMode amplitude_mode = AmplitudeMode::UnitOnes;
  std::vector<double> amplitudes;  // Custom mode: exactly K nonzero values
  MatrixMode matrix_mode = MatrixMode::SubsampledIdentity;
  std::uint64_t seed = 0;

  void validate() const;
};

/// One generated problem: y = A theta exactly, B = A + V exactly, and V
/// bounded per the configured delta semantics.
struct MeasurementInstance {
  Vec theta_true;
  Mat A;
  Mat V;
  Mat B;
  Vec y;
  InstanceConfig config;

  std::vector<std::size_t> true_support() const;
  void validate() const;
};

Vec gen_sparse_signal(std::size_t N, std::size_t K, AmplitudeMode mode,
                      const std::vector<double>& amplitudes, Rng& rng);
Mat gen_measurement_matrix(std::size_t M, std::size_t N, MatrixMode mode, Rng& rng);

/// Truncated-Gaussian perturbation with sigma = delta/2. Elementwise:
/// entries redrawn until |v| <= delta. RowL1: same draw, then rows with
/// l1 norm > delta rescaled to exactly delta.
Mat gen_perturbation(std::size_t M, std::size_t N, double delta,
                     DeltaSemantics semantics, Rng& rng);

MeasurementInstance gen_instance(const InstanceConfig& config);

/// Builds an instance from pre-generated parts (used by the fixed-support
/// profile harness); computes y and B and validates all invariants.
MeasurementInstance assemble_instance(Vec theta, Mat A, Mat V, InstanceConfig config);

void write_instance(const std::string& path, const MeasurementInstance& instance);
MeasurementInstance read_instance(const std::string& path);

}  // namespace rcs
