#pragma once

#include "ddsense/geometry.hpp"
#include "ddsense/spin_ops.hpp"

namespace ddsense {

inline constexpr double kHbar = 1.054571817e-34;       // J s
inline constexpr double kMu0 = 1.25663706212e-6;       // N A^-2

enum class Protocol { DC, RF };
enum class Model { Secular, Full };

// SI boundary. Internally everything is dimensionless: times in 1/omega_dd,
// fields as b = gamma*B/omega_dd, lengths in rho^-1/3.
struct UnitSystem {
  double rho = 1e21;  // spins per m^3
  SpinSpecies species;

  double omega_dd() const {
    const double g = species.gamma;
    return species.s * species.s * g * g * kHbar * kMu0 * rho;
  }
  double tau_from_seconds(double t) const { return t * omega_dd(); }
  double seconds_from_tau(double tau) const { return tau / omega_dd(); }
  double b_from_tesla(double field) const { return species.gamma * field / omega_dd(); }
  double tesla_from_b(double b) const { return b * omega_dd() / species.gamma; }
};

struct ProtocolParams {
  Protocol protocol = Protocol::DC;
  Model model = Model::Secular;
  double omega_ratio = 20.0;  // omega_L / omega_dd, Full model only
  double rf_bias = 1e-3;      // gamma*B_RF/omega_dd evaluation point, RF only

  void validate() const;  // throws std::invalid_argument
};

// Rotating-frame dipolar Hamiltonian in units of hbar*omega_dd, with pair
// directions rotated about z by `phase` = omega_L * t. phase = 0 is the
// lab-frame dipolar Hamiltonian.
Matrix rotating_dd_hamiltonian(const ClusterGeometry& c, const SpinSpecies& species,
                               double phase);

// Larmor-cycle average of the rotating-frame Hamiltonian, in hbar*omega_dd.
Matrix secular_dd_hamiltonian(const ClusterGeometry& c, const SpinSpecies& species);

// Resonant drive in the frame rotating at the RF frequency:
// -(b_rf/2) * sum_i sx_i, where b_rf is the lab-frame RF amplitude
// gamma*B_rf/omega_dd (the rotating-wave approximation halves it).
Matrix rf_drive(const SpinSpecies& species, int n_sites, double b_rf);

}  // namespace ddsense
