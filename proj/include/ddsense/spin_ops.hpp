#pragma once

#include <complex>
#include <Eigen/Dense>

namespace ddsense {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Dense storage ceiling for the cluster Hilbert space.
inline constexpr int kMaxHilbertDim = 4096;

// Spin quantum number and gyromagnetic ratio. gamma is only used at the SI
// boundary; everything internal is dimensionless with hbar = 1.
struct SpinSpecies {
  double s = 0.5;
  double gamma = 1.76e11;  // rad s^-1 T^-1

  int local_dim() const { return static_cast<int>(std::lround(2.0 * s)) + 1; }
  void validate() const;  // throws std::invalid_argument
};

struct SpinMatrices {
  Matrix sx, sy, sz;  // (2s+1) x (2s+1), hbar = 1
};

// Angular momentum matrices for arbitrary s; sz = diag(s, s-1, ..., -s).
SpinMatrices spin_operators(const SpinSpecies& species);

// Hilbert dimension (2s+1)^M; throws std::invalid_argument above the ceiling.
int hilbert_dim(const SpinSpecies& species, int n_sites);

// op acting on `site` (0-based), identity elsewhere. op must be d x d with
// d the local dimension implied by dim(op).
Matrix embed_operator(const Matrix& op, int site, int n_sites);

// Two-site operator T (d^2 x d^2, site i as the first tensor factor) embedded
// at sites (i, j) of an n_sites chain, identity elsewhere. Added into h.
void add_embedded_pair(Matrix& h, const Matrix& pair_op, int site_i, int site_j,
                       int n_sites, int local_dim);

// out += weight * (op at site) * psi, without forming the embedded matrix.
void apply_site_operator(const Matrix& op, int site, int n_sites,
                         const Vector& psi, Vector& out,
                         Complex weight = Complex(1.0, 0.0));

// (sum_i op_i) * psi for a single-site operator op.
Vector apply_collective(const Matrix& op, int n_sites, const Vector& psi);

// Product of per-site spin-coherent states polarized along `axis`.
Vector coherent_product_state(const Vec3& axis, const SpinSpecies& species,
                              int n_sites);

}  // namespace ddsense
