#include "ddsense/ensemble.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "ddsense/rng.hpp"

namespace ddsense {

const char* const kCodeVersion = "0.1.0";

uint64_t derive_seed(uint64_t master, uint64_t salt) {
  RngStream stream(master, 0xdd5eed0000ULL + salt);
  return stream.next_u64();
}

void TauGridSpec::validate() const {
  if (points < 3) throw std::invalid_argument("tau grid needs at least 3 points");
  if (!(tau_min > 0.0) || !(tau_max > tau_min)) {
    throw std::invalid_argument("tau grid requires 0 < tau_min < tau_max");
  }
}

std::vector<double> TauGridSpec::make() const {
  validate();
  std::vector<double> grid(points);
  for (int k = 0; k < points; ++k) {
    const double f = static_cast<double>(k) / (points - 1);
    grid[k] = geometric ? tau_min * std::pow(tau_max / tau_min, f)
                        : tau_min + f * (tau_max - tau_min);
  }
  grid.back() = tau_max;
  return grid;
}

void ExperimentConfig::validate() const {
  species.validate();
  protocol.validate();
  grid.validate();
  if (n_clusters < 100) throw std::invalid_argument("need at least 100 clusters");
  if (cluster_size < 1) throw std::invalid_argument("cluster size must be >= 1");
  hilbert_dim(species, cluster_size);  // enforces the dense ceiling
  if (steps_per_period < 4) throw std::invalid_argument("steps_per_period must be >= 4");
  if (!(rf_fd_step > 0.0)) throw std::invalid_argument("rf_fd_step must be positive");
  if (!(omega_fd_rel_step > 0.0)) {
    throw std::invalid_argument("omega_fd_rel_step must be positive");
  }
  if (!(rho > 0.0)) throw std::invalid_argument("density must be positive");
  if (min_distance < 0.0) throw std::invalid_argument("min_distance must be >= 0");
  if (jackknife_blocks < 2 || jackknife_blocks > n_clusters) {
    throw std::invalid_argument("jackknife_blocks must be in [2, n_clusters]");
  }
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  count += other.count;
  sum_mean += other.sum_mean;
  sum_second += other.sum_second;
  sum_mean_outer += other.sum_mean_outer;
  sum_mean_plus += other.sum_mean_plus;
  sum_mean_minus += other.sum_mean_minus;
  sum_mean_plus_h2 += other.sum_mean_plus_h2;
  sum_mean_minus_h2 += other.sum_mean_minus_h2;
}

namespace {

struct SharedContext {
  ExperimentConfig config;
  std::vector<double> tau_grid;
  Vector psi0;
  SpinMatrices local_ops;
  size_t memory_estimate = 0;
};

SharedContext make_context(const ExperimentConfig& config) {
  SharedContext ctx;
  ctx.config = config;
  ctx.tau_grid = config.grid.make();
  const Vec3 axis = (config.protocol.protocol == Protocol::DC) ? Vec3(1, 0, 0)
                                                               : Vec3(0, 0, 1);
  ctx.psi0 = coherent_product_state(axis, config.species, config.cluster_size);
  ctx.local_ops = spin_operators(config.species);
  return ctx;
}

void check_memory(const SharedContext& ctx, int n_threads) {
  const size_t d = static_cast<size_t>(ctx.psi0.size());
  // dominant live objects per worker: Hamiltonian, eigenvectors, propagation
  // workspace; ~6 dense matrices
  const size_t per_thread = 6 * d * d * sizeof(Complex);
  const size_t total = per_thread * static_cast<size_t>(std::max(1, n_threads));
  constexpr size_t kCeiling = size_t(12) * 1024 * 1024 * 1024;
  if (total > kCeiling) {
    throw std::invalid_argument("estimated peak memory " + std::to_string(total >> 20) +
                                " MiB exceeds the 12 GiB ceiling");
  }
}

void add_moments_from_trajectory(const SharedContext& ctx, const Trajectory& traj,
                                 std::vector<MomentAccumulator>& accs) {
  for (size_t t = 0; t < traj.states.size(); ++t) {
    const MomentSample m =
        collective_moments(traj.states[t], ctx.config.species, ctx.config.cluster_size);
    accs[t].count += 1;
    accs[t].sum_mean += m.mean;
    accs[t].sum_second += m.second;
    accs[t].sum_mean_outer += m.mean * m.mean.transpose();
  }
}

void add_means_from_trajectory(const SharedContext& ctx, const Trajectory& traj,
                               std::vector<MomentAccumulator>& accs,
                               Vec3 MomentAccumulator::* field) {
  for (size_t t = 0; t < traj.states.size(); ++t) {
    const MomentSample m =
        collective_moments(traj.states[t], ctx.config.species, ctx.config.cluster_size);
    accs[t].*field += m.mean;
  }
}

// one cluster's full contribution across the tau grid
void process_cluster(const SharedContext& ctx, long cluster_index,
                     std::vector<MomentAccumulator>& accs) {
  const ExperimentConfig& cfg = ctx.config;
  RngStream rng(cfg.seed, static_cast<uint64_t>(cluster_index));
  const ClusterGeometry geom =
      sample_cluster(cfg.cluster_size, rng, cfg.min_distance);

  switch (cfg.protocol.protocol) {
    case Protocol::DC: {
      if (cfg.protocol.model == Model::Secular) {
        const SpectralFactorization fact(secular_dd_hamiltonian(geom, cfg.species));
        add_moments_from_trajectory(ctx, evolve_static(fact, ctx.psi0, ctx.tau_grid), accs);
      } else {
        const double ratio = cfg.protocol.omega_ratio;
        const double h = cfg.omega_fd_rel_step * ratio;
        add_moments_from_trajectory(
            ctx,
            evolve_periodic(geom, cfg.species, ratio, ctx.psi0, ctx.tau_grid,
                            cfg.steps_per_period),
            accs);
        add_means_from_trajectory(
            ctx,
            evolve_periodic(geom, cfg.species, ratio + h, ctx.psi0, ctx.tau_grid,
                            cfg.steps_per_period),
            accs, &MomentAccumulator::sum_mean_plus);
        add_means_from_trajectory(
            ctx,
            evolve_periodic(geom, cfg.species, ratio - h, ctx.psi0, ctx.tau_grid,
                            cfg.steps_per_period),
            accs, &MomentAccumulator::sum_mean_minus);
      }
      break;
    }
    case Protocol::RF: {
      const Matrix h_dd = secular_dd_hamiltonian(geom, cfg.species);
      const double b0 = cfg.protocol.rf_bias;
      const double h = cfg.rf_fd_step;
      auto evolve_at = [&](double b) {
        const Matrix ham = h_dd + rf_drive(cfg.species, cfg.cluster_size, b);
        return evolve_static(SpectralFactorization(ham), ctx.psi0, ctx.tau_grid);
      };
      add_moments_from_trajectory(ctx, evolve_at(b0), accs);
      add_means_from_trajectory(ctx, evolve_at(b0 + h), accs,
                                &MomentAccumulator::sum_mean_plus);
      add_means_from_trajectory(ctx, evolve_at(b0 - h), accs,
                                &MomentAccumulator::sum_mean_minus);
      add_means_from_trajectory(ctx, evolve_at(b0 + 0.5 * h), accs,
                                &MomentAccumulator::sum_mean_plus_h2);
      add_means_from_trajectory(ctx, evolve_at(b0 - 0.5 * h), accs,
                                &MomentAccumulator::sum_mean_minus_h2);
      break;
    }
  }
}

struct PointEstimate {
  double er = 0.0;
  Vec3 mean1 = Vec3::Zero();   // per-cluster ensemble mean
  Mat3 cov1 = Mat3::Zero();    // per-cluster joint covariance
  Vec3 grad_h = Vec3::Zero();
  Vec3 grad_h2 = Vec3::Zero();
};

PointEstimate estimate_point(const ExperimentConfig& cfg, double tau,
                             const MomentAccumulator& acc) {
  PointEstimate out;
  const double n = static_cast<double>(acc.count);
  out.mean1 = acc.sum_mean / n;
  const Mat3 second1 = acc.sum_second / n;
  if (cfg.quantum_only_covariance) {
    out.cov1 = (acc.sum_second - acc.sum_mean_outer) / n;
  } else {
    out.cov1 = second1 - out.mean1 * out.mean1.transpose();
  }

  Vec3 grad = Vec3::Zero();
  switch (cfg.protocol.protocol) {
    case Protocol::DC:
      grad = dc_generator_gradient(out.mean1, tau);
      if (cfg.protocol.model == Model::Full) {
        const double h = cfg.omega_fd_rel_step * cfg.protocol.omega_ratio;
        // dynamical b-dependence of the rotating-frame mean; relative sign
        // fixed by the frame-rotation generator (see tests)
        grad -= fd_gradient(acc.sum_mean_plus / n, acc.sum_mean_minus / n, h);
      }
      break;
    case Protocol::RF:
      out.grad_h = fd_gradient(acc.sum_mean_plus / n, acc.sum_mean_minus / n,
                               cfg.rf_fd_step);
      out.grad_h2 = fd_gradient(acc.sum_mean_plus_h2 / n, acc.sum_mean_minus_h2 / n,
                                0.5 * cfg.rf_fd_step);
      grad = out.grad_h;
      break;
  }

  const OptimalReadout readout = optimal_variance(out.cov1, grad);
  // per-cluster normalized variance; Q cancels in E_R
  out.er = energy_resolution_over_hbar(cfg.species.s, cfg.cluster_size, tau,
                                       readout.variance);
  return out;
}

MomentAccumulator total_minus(const std::vector<std::vector<MomentAccumulator>>& blocks,
                              size_t tau_index, int skip_block) {
  MomentAccumulator total;
  for (size_t b = 0; b < blocks.size(); ++b) {
    if (static_cast<int>(b) == skip_block) continue;
    total.merge(blocks[b][tau_index]);
  }
  return total;
}

}  // namespace

SensitivityCurve analyze_blocks(const ExperimentConfig& config,
                                const std::vector<double>& tau_grid,
                                const std::vector<std::vector<MomentAccumulator>>& blocks,
                                std::vector<Vec3>* mean_per_spin,
                                std::vector<Vec3>* var_per_spin) {
  const size_t n_tau = tau_grid.size();
  const int n_blocks = static_cast<int>(blocks.size());

  SensitivityCurve curve;
  curve.tau = tau_grid;
  curve.er_over_hbar.resize(n_tau);
  curve.stderr_er.resize(n_tau);
  if (mean_per_spin) mean_per_spin->resize(n_tau);
  if (var_per_spin) var_per_spin->resize(n_tau);

  const double m_spins = static_cast<double>(config.cluster_size);
  std::vector<std::vector<double>> leave_out(n_blocks,
                                             std::vector<double>(n_tau, 0.0));

  for (size_t t = 0; t < n_tau; ++t) {
    const MomentAccumulator total = total_minus(blocks, t, -1);
    const PointEstimate full = estimate_point(config, tau_grid[t], total);
    curve.er_over_hbar[t] = full.er;
    if (mean_per_spin) (*mean_per_spin)[t] = full.mean1 / m_spins;
    if (var_per_spin) (*var_per_spin)[t] = full.cov1.diagonal() / (m_spins * m_spins);

    double sum = 0.0, sum2 = 0.0;
    for (int b = 0; b < n_blocks; ++b) {
      const MomentAccumulator partial = total_minus(blocks, t, b);
      leave_out[b][t] = estimate_point(config, tau_grid[t], partial).er;
      sum += leave_out[b][t];
      sum2 += leave_out[b][t] * leave_out[b][t];
    }
    const double mean_b = sum / n_blocks;
    const double var_b = std::max(0.0, sum2 / n_blocks - mean_b * mean_b);
    curve.stderr_er[t] = std::sqrt((n_blocks - 1.0) * var_b);
  }

  const Optimum opt = find_optimum(curve.tau, curve.er_over_hbar);
  curve.tau_opt = opt.tau_opt;
  curve.er_min = opt.er_min;
  curve.boundary_minimum = opt.on_boundary;

  // jackknife on the located minimum itself
  double sum = 0.0, sum2 = 0.0;
  int n_ok = 0;
  for (int b = 0; b < n_blocks; ++b) {
    try {
      const Optimum o = find_optimum(curve.tau, leave_out[b]);
      sum += o.er_min;
      sum2 += o.er_min * o.er_min;
      ++n_ok;
    } catch (const std::exception&) {
    }
  }
  if (n_ok >= 2) {
    const double mean_b = sum / n_ok;
    const double var_b = std::max(0.0, sum2 / n_ok - mean_b * mean_b);
    curve.er_min_stderr = std::sqrt((n_ok - 1.0) * var_b);
  }
  return curve;
}

ExperimentResult run_experiment(const ExperimentConfig& config, int n_threads,
                                bool serial) {
  config.validate();
  const auto t_start = std::chrono::steady_clock::now();

  const SharedContext ctx = make_context(config);
  const size_t n_tau = ctx.tau_grid.size();
  const int n_blocks = config.jackknife_blocks;

  int threads = serial ? 1 : (n_threads > 0 ? n_threads : omp_get_max_threads());
  check_memory(ctx, threads);

  std::vector<std::vector<MomentAccumulator>> blocks(
      n_blocks, std::vector<MomentAccumulator>(n_tau));

  const long q_total = config.n_clusters;
  if (serial) {
    std::vector<MomentAccumulator> scratch(n_tau);
    for (long q = 0; q < q_total; ++q) {
      for (auto& a : scratch) a = MomentAccumulator{};
      process_cluster(ctx, q, scratch);
      auto& dst = blocks[q % n_blocks];
      for (size_t t = 0; t < n_tau; ++t) dst[t].merge(scratch[t]);
    }
  } else {
#pragma omp parallel num_threads(threads)
    {
      std::vector<std::vector<MomentAccumulator>> local(
          n_blocks, std::vector<MomentAccumulator>(n_tau));
      std::vector<MomentAccumulator> scratch(n_tau);
#pragma omp for schedule(dynamic, 8)
      for (long q = 0; q < q_total; ++q) {
        for (auto& a : scratch) a = MomentAccumulator{};
        process_cluster(ctx, q, scratch);
        auto& dst = local[q % n_blocks];
        for (size_t t = 0; t < n_tau; ++t) dst[t].merge(scratch[t]);
      }
#pragma omp critical
      {
        for (int b = 0; b < n_blocks; ++b) {
          for (size_t t = 0; t < n_tau; ++t) blocks[b][t].merge(local[b][t]);
        }
      }
    }
  }

  ExperimentResult result;
  result.config = config;
  result.blocks = std::move(blocks);
  result.curve = analyze_blocks(config, ctx.tau_grid, result.blocks,
                                &result.mean_per_spin, &result.var_per_spin);
  result.threads_used = threads;
  result.code_version = kCodeVersion;

  if (config.protocol.protocol == Protocol::RF) {
    // Richardson consistency of the RF gradient at the located optimum scale
    double worst = 0.0;
    for (size_t t = 0; t < n_tau; ++t) {
      const MomentAccumulator total = total_minus(result.blocks, t, -1);
      const PointEstimate p = estimate_point(config, ctx.tau_grid[t], total);
      const double scale = p.grad_h2.norm();
      if (scale > 1e-9 * config.cluster_size) {
        worst = std::max(worst, (p.grad_h - p.grad_h2).norm() / scale);
      }
    }
    result.rf_fd_max_mismatch = worst;
    result.rf_fd_converged = worst < 0.05;
  }

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

std::vector<SweepPoint> sweep(const ExperimentConfig& base, SweepAxis axis,
                              const std::vector<double>& values, int n_threads,
                              bool serial) {
  std::vector<SweepPoint> points;
  points.reserve(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    SweepPoint point;
    point.value = values[i];
    ExperimentConfig cfg = base;
    cfg.seed = derive_seed(base.seed, i);
    switch (axis) {
      case SweepAxis::ClusterSize:
        cfg.cluster_size = static_cast<int>(std::lround(values[i]));
        break;
      case SweepAxis::SpinQuantumNumber:
        cfg.species.s = values[i];
        break;
      case SweepAxis::OmegaRatio:
        cfg.protocol.omega_ratio = values[i];
        break;
    }
    try {
      point.result = run_experiment(cfg, n_threads, serial);
      point.ok = true;
    } catch (const std::exception& e) {
      point.error = e.what();
    }
    points.push_back(std::move(point));
  }
  return points;
}

}  // namespace ddsense
