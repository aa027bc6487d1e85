#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ddsense/dynamics.hpp"
#include "ddsense/estimation.hpp"
#include "ddsense/hamiltonians.hpp"

namespace ddsense {

struct TauGridSpec {
  double tau_min = 0.02;
  double tau_max = 3.0;
  int points = 60;
  bool geometric = true;

  void validate() const;
  std::vector<double> make() const;
};

struct ExperimentConfig {
  SpinSpecies species;
  int cluster_size = 2;       // M spins per cluster
  long n_clusters = 40000;    // Q
  ProtocolParams protocol;
  TauGridSpec grid;
  uint64_t seed = 1;
  int steps_per_period = 32;  // Full-model integrator resolution
  double rf_fd_step = 1e-3;   // central FD step in b_rf
  double omega_fd_rel_step = 1e-3;  // relative FD step in omega_ratio
  double rho = 1e21;          // SI boundary only
  double min_distance = 0.0;  // numerical-sensitivity floor, off by default
  bool quantum_only_covariance = false;  // diagnostic: drop classical spread
  int jackknife_blocks = 20;

  void validate() const;  // throws std::invalid_argument
};

// Mergeable per-cluster partial sums for one grid point. Merging is
// commutative and associative, so any parallel reduction order is valid.
struct MomentAccumulator {
  long count = 0;
  Vec3 sum_mean = Vec3::Zero();
  Mat3 sum_second = Mat3::Zero();
  Mat3 sum_mean_outer = Mat3::Zero();
  Vec3 sum_mean_plus = Vec3::Zero();
  Vec3 sum_mean_minus = Vec3::Zero();
  Vec3 sum_mean_plus_h2 = Vec3::Zero();
  Vec3 sum_mean_minus_h2 = Vec3::Zero();

  void merge(const MomentAccumulator& other);
};

struct ExperimentResult {
  ExperimentConfig config;
  SensitivityCurve curve;
  // per-grid-point diagnostics, per-spin normalization as in the result CSV
  std::vector<Vec3> mean_per_spin;
  std::vector<Vec3> var_per_spin;
  double rf_fd_max_mismatch = 0.0;
  bool rf_fd_converged = true;
  double wall_seconds = 0.0;
  int threads_used = 1;
  std::string code_version;
  // raw block sums, kept for merge/splitting tests and re-analysis
  std::vector<std::vector<MomentAccumulator>> blocks;  // [block][tau]
};

// n_threads = 0 picks the OpenMP default. serial = true runs the reference
// single-threaded loop with a fixed accumulation order (bit reproducible).
ExperimentResult run_experiment(const ExperimentConfig& config, int n_threads = 0,
                                bool serial = false);

// Re-derive the sensitivity curve from block sums (used by the jackknife and
// by the accumulator-splitting tests).
SensitivityCurve analyze_blocks(const ExperimentConfig& config,
                                const std::vector<double>& tau_grid,
                                const std::vector<std::vector<MomentAccumulator>>& blocks,
                                std::vector<Vec3>* mean_per_spin = nullptr,
                                std::vector<Vec3>* var_per_spin = nullptr);

enum class SweepAxis { ClusterSize, SpinQuantumNumber, OmegaRatio };

struct SweepPoint {
  double value = 0.0;
  bool ok = false;
  std::string error;
  ExperimentResult result;
};

// Independent experiments with per-value derived seeds; failures are
// isolated per point.
std::vector<SweepPoint> sweep(const ExperimentConfig& base, SweepAxis axis,
                              const std::vector<double>& values, int n_threads = 0,
                              bool serial = false);

uint64_t derive_seed(uint64_t master, uint64_t salt);

extern const char* const kCodeVersion;

}  // namespace ddsense
