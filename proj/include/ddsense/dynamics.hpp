#pragma once

#include <span>
#include <vector>

#include "ddsense/hamiltonians.hpp"
#include "ddsense/propagator.hpp"

namespace ddsense {

struct Trajectory {
  std::vector<double> tau;
  std::vector<Vector> states;
};

// psi(tau) = exp(-i H tau) psi0 on an ascending grid starting at >= 0, from a
// single spectral factorization.
Trajectory evolve_static(const Matrix& h, const Vector& psi0,
                         std::span<const double> tau_grid);
Trajectory evolve_static(const SpectralFactorization& fact, const Vector& psi0,
                         std::span<const double> tau_grid);

// Evolution under the time-periodic rotating-frame Hamiltonian with
// phase = omega_ratio * tau, by exponential-midpoint steps of size at most
// one Larmor period / steps_per_period. Grid points are hit exactly.
Trajectory evolve_periodic(const ClusterGeometry& c, const SpinSpecies& species,
                           double omega_ratio, const Vector& psi0,
                           std::span<const double> tau_grid, int steps_per_period);

}  // namespace ddsense
