#pragma once

#include <span>
#include <vector>

#include "ddsense/spin_ops.hpp"

namespace ddsense {

// Per-cluster collective-spin statistics: mean <S> and symmetrized second
// moment <(S_a S_b + S_b S_a)/2>.
struct MomentSample {
  Vec3 mean = Vec3::Zero();
  Mat3 second = Mat3::Zero();
};

MomentSample collective_moments(const Vector& psi, const SpinSpecies& species,
                                int n_sites);

// Joint quantum+classical covariance over sampled configurations:
//   mean_total = Q * E[mean],  cov = Q * (E[second] - E[mean] E[mean]^T).
struct EnsembleMoments {
  Vec3 mean_total = Vec3::Zero();
  Mat3 cov = Mat3::Zero();
};

EnsembleMoments ensemble_covariance(std::span<const MomentSample> samples, double n_clusters);

// DC generator-method gradient, d<S>/db for the frame-rotation part:
// g = tau * (z x mean). The secular dynamics carries no other b dependence.
Vec3 dc_generator_gradient(const Vec3& mean_total, double tau);

// central finite difference of an ensemble mean over a scalar parameter
Vec3 fd_gradient(const Vec3& mean_plus, const Vec3& mean_minus, double step);

// min over n of (n.cov.n)/(g.n)^2, solved as a generalized Rayleigh quotient
// n_opt ~ cov^-1 g. Singular covariance along g falls back to the
// pseudo-inverse; rank is reported. g = 0 yields an infinite variance.
struct OptimalReadout {
  double variance = 0.0;
  Vec3 direction = Vec3::Zero();
  int rank = 3;
  bool degenerate = false;  // g = 0 or cov singular along g
};

OptimalReadout optimal_variance(const Mat3& cov, const Vec3& grad);

// E_R/hbar = s^2/2 * N * tau * <db^2> with N = Q*M; all SI factors
// (rho, gamma, mu0) cancel in dimensionless form.
double energy_resolution_over_hbar(double s, double n_spins_total, double tau,
                                   double var_b);

struct SensitivityCurve {
  std::vector<double> tau;
  std::vector<double> er_over_hbar;
  std::vector<double> stderr_er;
  double tau_opt = 0.0;
  double er_min = 0.0;
  double er_min_stderr = 0.0;
  bool boundary_minimum = false;
};

struct Optimum {
  double tau_opt = 0.0;
  double er_min = 0.0;
  bool on_boundary = false;
};

// Grid minimum refined by a parabola through the three bracketing points.
// Throws std::invalid_argument on fewer than 3 finite points.
Optimum find_optimum(std::span<const double> tau, std::span<const double> values);

}  // namespace ddsense
