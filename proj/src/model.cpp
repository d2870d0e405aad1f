#include "rcs/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace rcs {

namespace {

// SplitMix64 step (Steele, Lea, Flood 2014).
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

std::uint64_t Rng::mix(std::uint64_t h, std::uint64_t v) {
  return splitmix64(h ^ (v + 0x9e3779b97f4a7c15ULL));
}

Rng Rng::derive(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t id : path) h = mix(h, id);
  return Rng(h);
}

double Rng::uniform01() { return (engine_() >> 11) * 0x1.0p-53; }

double Rng::normal(double sigma) {
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  return sigma * std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw ParameterError("Rng::below: n must be > 0");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t k) {
  if (k > n) throw ParameterError("sample_without_replacement: k > n");
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(below(n - i));
    std::swap(pool[i], pool[j]);
    out[i] = pool[i];
  }
  return out;
}

std::string to_string(DeltaSemantics s) {
  return s == DeltaSemantics::Elementwise ? "elementwise" : "row_l1";
}

std::string to_string(MatrixMode m) {
  return m == MatrixMode::SubsampledIdentity ? "subsampled_identity" : "gaussian";
}

DeltaSemantics delta_semantics_from_string(const std::string& s) {
  if (s == "elementwise") return DeltaSemantics::Elementwise;
  if (s == "row_l1") return DeltaSemantics::RowL1;
  throw ParameterError("unknown delta semantics '" + s + "'");
}

MatrixMode matrix_mode_from_string(const std::string& s) {
  if (s == "subsampled_identity") return MatrixMode::SubsampledIdentity;
  if (s == "gaussian") return MatrixMode::Gaussian;
  throw ParameterError("unknown matrix mode '" + s + "'");
}

void InstanceConfig::validate() const {
  if (N < 1) throw ParameterError("InstanceConfig: N must be >= 1");
  if (M < 1 || M > N) throw ParameterError("InstanceConfig: require 1 <= M <= N");
  if (K > N) throw ParameterError("InstanceConfig: require K <= N");
  if (delta < 0.0) throw ParameterError("InstanceConfig: delta must be >= 0");
  if (amplitude_mode == AmplitudeMode::Custom && amplitudes.size() != K) {
    throw ParameterError("InstanceConfig: custom amplitudes must have K entries");
  }
}

std::vector<std::size_t> MeasurementInstance::true_support() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < theta_true.size(); ++i) {
    if (theta_true[i] != 0.0) out.push_back(i);
  }
  return out;
}

void MeasurementInstance::validate() const {
  config.validate();
  const std::size_t n = config.N;
  const std::size_t m = config.M;
  if (theta_true.size() != n || y.size() != m || A.rows() != m || A.cols() != n ||
      V.rows() != m || V.cols() != n || B.rows() != m || B.cols() != n) {
    throw DimensionError("MeasurementInstance: dimensions disagree with config");
  }
  if (true_support().size() != config.K) {
    throw ParameterError("MeasurementInstance: support size != K");
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (B(i, j) != A(i, j) + V(i, j)) {
        throw ParameterError("MeasurementInstance: B != A + V");
      }
    }
  }
  const Vec ax = matvec(A, theta_true);
  for (std::size_t i = 0; i < m; ++i) {
    if (y[i] != ax[i]) throw ParameterError("MeasurementInstance: y != A theta");
  }
  if (config.delta_semantics == DeltaSemantics::Elementwise) {
    for (double v : V.data()) {
      if (std::fabs(v) > config.delta) {
        throw ParameterError("MeasurementInstance: |V_ij| > delta");
      }
    }
  } else {
    if (mat_inf_norm(V) > config.delta) {
      throw ParameterError("MeasurementInstance: mat_inf_norm(V) > delta");
    }
  }
}

Vec gen_sparse_signal(std::size_t N, std::size_t K, AmplitudeMode mode,
                      const std::vector<double>& amplitudes, Rng& rng) {
  if (K > N) throw ParameterError("gen_sparse_signal: K > N");
  std::vector<double> theta(N, 0.0);
  const std::vector<std::size_t> support = rng.sample_without_replacement(N, K);
  for (std::size_t i = 0; i < K; ++i) {
    double value = 1.0;
    if (mode == AmplitudeMode::Custom) {
      if (amplitudes.size() != K) {
        throw ParameterError("gen_sparse_signal: need K custom amplitudes");
      }
      value = amplitudes[i];
      if (value == 0.0 || !std::isfinite(value)) {
        throw ParameterError("gen_sparse_signal: custom amplitudes must be finite and nonzero");
      }
    }
    theta[support[i]] = value;
  }
  return Vec(std::move(theta));
}

Mat gen_measurement_matrix(std::size_t M, std::size_t N, MatrixMode mode, Rng& rng) {
  if (mode == MatrixMode::SubsampledIdentity) {
    if (M > N) {
      throw ParameterError("gen_measurement_matrix: M > N under subsampled identity");
    }
    Mat a(M, N, 0.0);
    const std::vector<std::size_t> rows = rng.sample_without_replacement(N, M);
    for (std::size_t i = 0; i < M; ++i) a(i, rows[i]) = 1.0;
    return a;
  }
  Mat a(M, N, 0.0);
  const double sigma = 1.0 / std::sqrt(static_cast<double>(M));
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = 0; j < N; ++j) a(i, j) = rng.normal(sigma);
  }
  return a;
}

Mat gen_perturbation(std::size_t M, std::size_t N, double delta,
                     DeltaSemantics semantics, Rng& rng) {
  if (delta < 0.0) throw ParameterError("gen_perturbation: delta must be >= 0");
  Mat v(M, N, 0.0);
  if (delta == 0.0) return v;
  const double sigma = 0.5 * delta;
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      double draw;
      do {
        draw = rng.normal(sigma);
      } while (std::fabs(draw) > delta);
      v(i, j) = draw;
    }
  }
  if (semantics == DeltaSemantics::RowL1) {
    for (std::size_t i = 0; i < M; ++i) {
      // Rescale until the recomputed sum respects the bound; a single pass
      // can land one rounding step above delta.
      while (true) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < N; ++j) row_sum += std::fabs(v(i, j));
        if (row_sum <= delta) break;
        double scale = delta / row_sum;
        if (scale >= 1.0) scale = 1.0 - std::numeric_limits<double>::epsilon();
        for (std::size_t j = 0; j < N; ++j) v(i, j) *= scale;
      }
    }
  }
  return v;
}

MeasurementInstance assemble_instance(Vec theta, Mat A, Mat V, InstanceConfig config) {
  MeasurementInstance inst;
  inst.theta_true = std::move(theta);
  inst.A = std::move(A);
  inst.V = std::move(V);
  inst.B = add(inst.A, inst.V);
  inst.y = matvec(inst.A, inst.theta_true);
  inst.config = std::move(config);
  inst.validate();
  return inst;
}

MeasurementInstance gen_instance(const InstanceConfig& config) {
  config.validate();
  Rng signal_rng = Rng::derive(config.seed, {1});
  Rng matrix_rng = Rng::derive(config.seed, {2});
  Rng perturb_rng = Rng::derive(config.seed, {3});
  Vec theta = gen_sparse_signal(config.N, config.K, config.amplitude_mode,
                                config.amplitudes, signal_rng);
  Mat a = gen_measurement_matrix(config.M, config.N, config.matrix_mode, matrix_rng);
  Mat v = gen_perturbation(config.M, config.N, config.delta,
                           config.delta_semantics, perturb_rng);
  return assemble_instance(std::move(theta), std::move(a), std::move(v), config);
}

namespace {

void write_kv(std::ostream& out, const char* key, const std::string& value) {
  out << key << " = " << value << "\n";
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void write_instance(const std::string& path, const MeasurementInstance& instance) {
  instance.validate();
  std::ofstream out(path);
  if (!out) throw Error("write_instance: cannot open '" + path + "'");
  write_kv(out, "N", std::to_string(instance.config.N));
  write_kv(out, "M", std::to_string(instance.config.M));
  write_kv(out, "K", std::to_string(instance.config.K));
  write_kv(out, "delta", format_double(instance.config.delta));
  write_kv(out, "delta_semantics", to_string(instance.config.delta_semantics));
  write_kv(out, "matrix_mode", to_string(instance.config.matrix_mode));
  write_kv(out, "seed", std::to_string(instance.config.seed));
  out << "[theta]\n";
  write_vector(out, instance.theta_true);
  out << "[A]\n";
  write_matrix(out, instance.A);
  out << "[V]\n";
  write_matrix(out, instance.V);
  out << "[y]\n";
  write_vector(out, instance.y);
  if (!out) throw Error("write_instance: write failed for '" + path + "'");
}

MeasurementInstance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("read_instance: cannot open '" + path + "'");
  std::size_t line_no = 0;
  InstanceConfig config;
  bool have[7] = {};
  std::string line;
  // header block of key = value lines, then the [theta] section marker
  while (true) {
    if (!std::getline(in, line)) {
      throw ParseError(line_no + 1, "unexpected end of header");
    }
    ++line_no;
    if (line.empty()) continue;
    if (line == "[theta]") break;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(line_no, "expected 'key = value' or '[theta]'");
    }
    std::istringstream key_s(line.substr(0, eq));
    std::istringstream val_s(line.substr(eq + 1));
    std::string key, value;
    key_s >> key;
    val_s >> value;
    if (key.empty() || value.empty()) {
      throw ParseError(line_no, "malformed 'key = value' line");
    }
    try {
      if (key == "N") config.N = std::stoul(value), have[0] = true;
      else if (key == "M") config.M = std::stoul(value), have[1] = true;
      else if (key == "K") config.K = std::stoul(value), have[2] = true;
      else if (key == "delta") config.delta = std::stod(value), have[3] = true;
      else if (key == "delta_semantics")
        config.delta_semantics = delta_semantics_from_string(value), have[4] = true;
      else if (key == "matrix_mode")
        config.matrix_mode = matrix_mode_from_string(value), have[5] = true;
      else if (key == "seed") config.seed = std::stoull(value), have[6] = true;
      else throw ParameterError("unknown header key '" + key + "'");
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  for (bool h : have) {
    if (!h) throw ParseError(line_no, "incomplete header before [theta]");
  }

  MeasurementInstance inst;
  inst.config = config;
  inst.theta_true = read_vector(in, line_no);
  auto expect_section = [&](const char* name) {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      if (line == name) return;
      throw ParseError(line_no, std::string("expected section ") + name);
    }
    throw ParseError(line_no + 1, std::string("missing section ") + name);
  };
  expect_section("[A]");
  inst.A = read_matrix(in, line_no);
  expect_section("[V]");
  inst.V = read_matrix(in, line_no);
  expect_section("[y]");
  inst.y = read_vector(in, line_no);
  inst.B = add(inst.A, inst.V);
  try {
    inst.validate();
  } catch (const Error& e) {
    throw ParseError(line_no, std::string("instance validation failed: ") + e.what());
  }
  return inst;
}

}  // namespace rcs
