#include "ddsense/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace ddsense {

namespace {

void check_grid(std::span<const double> tau_grid) {
  if (tau_grid.empty()) throw std::invalid_argument("empty time grid");
  if (tau_grid.front() < 0.0) throw std::invalid_argument("negative evolution time");
  for (size_t k = 1; k < tau_grid.size(); ++k) {
    if (tau_grid[k] <= tau_grid[k - 1]) {
      throw std::invalid_argument("time grid must be strictly increasing");
    }
  }
}

}  // namespace

Trajectory evolve_static(const SpectralFactorization& fact, const Vector& psi0,
                         std::span<const double> tau_grid) {
  check_grid(tau_grid);
  if (psi0.size() != fact.dim()) throw std::invalid_argument("state dimension mismatch");
  const SpectralEvolver evolver(fact, psi0);
  Trajectory traj;
  traj.tau.assign(tau_grid.begin(), tau_grid.end());
  traj.states.reserve(tau_grid.size());
  for (double tau : tau_grid) traj.states.push_back(evolver.state_at(tau));
  return traj;
}

Trajectory evolve_static(const Matrix& h, const Vector& psi0,
                         std::span<const double> tau_grid) {
  return evolve_static(SpectralFactorization(h), psi0, tau_grid);
}

Trajectory evolve_periodic(const ClusterGeometry& c, const SpinSpecies& species,
                           double omega_ratio, const Vector& psi0,
                           std::span<const double> tau_grid, int steps_per_period) {
  check_grid(tau_grid);
  if (!(omega_ratio > 0.0)) throw std::invalid_argument("omega ratio must be positive");
  if (steps_per_period < 4) {
    throw std::invalid_argument("need at least 4 steps per Larmor period");
  }
  const double max_step = 2.0 * M_PI / (steps_per_period * omega_ratio);

  Trajectory traj;
  traj.tau.assign(tau_grid.begin(), tau_grid.end());
  traj.states.reserve(tau_grid.size());

  Vector psi = psi0;
  double tau = 0.0;
  for (double target : tau_grid) {
    const double span = target - tau;
    if (span > 0.0) {
      const int n_steps = static_cast<int>(std::ceil(span / max_step - 1e-12));
      const double dt = span / n_steps;
      for (int k = 0; k < n_steps; ++k) {
        const double mid = tau + (k + 0.5) * dt;
        const Matrix h = rotating_dd_hamiltonian(c, species, omega_ratio * mid);
        psi = SpectralFactorization(h).evolve(psi, dt);
      }
      tau = target;
    }
    traj.states.push_back(psi);
  }
  return traj;
}

}  // namespace ddsense
