#include "ddsense/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ddsense {

MomentSample collective_moments(const Vector& psi, const SpinSpecies& species,
                                int n_sites) {
  const double norm2 = psi.squaredNorm();
  if (std::abs(norm2 - 1.0) > 1e-10) {
    throw std::invalid_argument("state is not normalized");
  }
  const SpinMatrices ops = spin_operators(species);
  const Matrix* s[3] = {&ops.sx, &ops.sy, &ops.sz};

  Vector phi[3];
  for (int a = 0; a < 3; ++a) phi[a] = apply_collective(*s[a], n_sites, psi);

  MomentSample out;
  for (int a = 0; a < 3; ++a) {
    out.mean(a) = psi.dot(phi[a]).real();
    for (int b = a; b < 3; ++b) {
      // <psi| S_a S_b |psi> = <phi_a|phi_b>; real part is the symmetrized moment
      const double v = phi[a].dot(phi[b]).real();
      out.second(a, b) = v;
      out.second(b, a) = v;
    }
  }
  return out;
}

EnsembleMoments ensemble_covariance(std::span<const MomentSample> samples,
                                    double n_clusters) {
  if (samples.size() < 2) throw std::invalid_argument("need at least two samples");
  Vec3 mean = Vec3::Zero();
  Mat3 second = Mat3::Zero();
  for (const MomentSample& m : samples) {
    mean += m.mean;
    second += m.second;
  }
  mean /= static_cast<double>(samples.size());
  second /= static_cast<double>(samples.size());

  EnsembleMoments out;
  out.mean_total = n_clusters * mean;
  out.cov = n_clusters * (second - mean * mean.transpose());
  return out;
}

Vec3 dc_generator_gradient(const Vec3& mean_total, double tau) {
  return tau * Vec3(0, 0, 1).cross(mean_total);
}

Vec3 fd_gradient(const Vec3& mean_plus, const Vec3& mean_minus, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  return (mean_plus - mean_minus) / (2.0 * step);
}

OptimalReadout optimal_variance(const Mat3& cov, const Vec3& grad) {
  OptimalReadout out;
  if (grad.norm() == 0.0) {
    out.variance = std::numeric_limits<double>::infinity();
    out.degenerate = true;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
  const Vec3 evals = es.eigenvalues();
  const double cutoff = 1e-12 * std::max(1e-300, evals.cwiseAbs().maxCoeff());

  // pseudo-inverse applied to g in the eigenbasis
  Vec3 proj = es.eigenvectors().transpose() * grad;
  double quad = 0.0;  // g^T cov^+ g
  Vec3 solved = Vec3::Zero();
  int rank = 0;
  bool grad_outside_range = false;
  for (int k = 0; k < 3; ++k) {
    if (evals(k) > cutoff) {
      ++rank;
      quad += proj(k) * proj(k) / evals(k);
      solved(k) = proj(k) / evals(k);
    } else if (std::abs(proj(k)) > 1e-12 * grad.norm()) {
      grad_outside_range = true;
    }
  }
  out.rank = rank;
  if (grad_outside_range) {
    // noiseless direction with signal: variance limited only by the
    // finite rank; flag it and report a zero-variance estimate
    out.degenerate = true;
    out.variance = 0.0;
    Vec3 n = Vec3::Zero();
    for (int k = 0; k < 3; ++k) {
      if (evals(k) <= cutoff && std::abs(proj(k)) > 1e-12 * grad.norm()) n(k) = proj(k);
    }
    out.direction = (es.eigenvectors() * n).normalized();
    return out;
  }
  if (quad <= 0.0) {
    out.variance = std::numeric_limits<double>::infinity();
    out.degenerate = true;
    return out;
  }
  out.variance = 1.0 / quad;
  out.direction = (es.eigenvectors() * solved).normalized();
  out.degenerate = (rank < 3);
  return out;
}

double energy_resolution_over_hbar(double s, double n_spins_total, double tau,
                                   double var_b) {
  return s * s / 2.0 * n_spins_total * tau * var_b;
}

Optimum find_optimum(std::span<const double> tau, std::span<const double> values) {
  if (tau.size() != values.size()) throw std::invalid_argument("grid size mismatch");
  size_t best = values.size();
  for (size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k])) continue;
    if (best == values.size() || values[k] < values[best]) best = k;
  }
  size_t n_finite = 0;
  for (double v : values) n_finite += std::isfinite(v) ? 1 : 0;
  if (n_finite < 3) throw std::invalid_argument("need at least 3 finite curve points");

  Optimum out;
  if (best == 0 || best + 1 == values.size() ||
      !std::isfinite(values[best - 1]) || !std::isfinite(values[best + 1])) {
    out.tau_opt = tau[best];
    out.er_min = values[best];
    out.on_boundary = true;
    return out;
  }

  const double x0 = tau[best - 1], x1 = tau[best], x2 = tau[best + 1];
  const double y0 = values[best - 1], y1 = values[best], y2 = values[best + 1];
  const double d1 = (y1 - y0) / (x1 - x0);
  const double d2 = (y2 - y1) / (x2 - x1);
  const double c = (d2 - d1) / (x2 - x0);  // half the curvature
  if (c <= 0.0) {
    out.tau_opt = x1;
    out.er_min = y1;
    return out;
  }
  // vertex of the interpolating parabola, clamped to the bracket
  double xv = 0.5 * (x0 + x1) - d1 / (2.0 * c);
  xv = std::clamp(xv, x0, x2);
  const double yv = y0 + d1 * (xv - x0) + c * (xv - x0) * (xv - x1);
  out.tau_opt = xv;
  out.er_min = std::min(yv, y1);
  return out;
}

}  // namespace ddsense
