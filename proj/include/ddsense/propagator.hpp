#pragma once

#include <vector>

#include "ddsense/spin_ops.hpp"

namespace ddsense {

// Relative Frobenius deviation from Hermiticity, ||H - H'|| / max(1, ||H||).
double hermiticity_error(const Matrix& h);

// Spectral factorization of a Hermitian matrix, split into the irreducible
// blocks of its sparsity pattern (e.g. magnetization sectors of the secular
// Hamiltonian). One factorization serves every evolution time.
class SpectralFactorization {
 public:
  struct Block {
    std::vector<int> index;   // rows/cols of the full matrix in this block
    Eigen::VectorXd evals;
    Matrix evecs;             // columns are eigenvectors within the block
  };

  // Throws std::invalid_argument if h is non-Hermitian beyond 1e-10 relative.
  explicit SpectralFactorization(const Matrix& h);

  int dim() const { return dim_; }
  const std::vector<Block>& blocks() const { return blocks_; }

  // U(tau) = exp(-i H tau), dense.
  Matrix propagator(double tau) const;

  // exp(-i H tau) psi
  Vector evolve(const Vector& psi, double tau) const;

 private:
  int dim_ = 0;
  std::vector<Block> blocks_;
};

// Repeated evolution of one initial state over many times: the eigenbasis
// coefficients of psi0 are computed once.
class SpectralEvolver {
 public:
  SpectralEvolver(const SpectralFactorization& fact, const Vector& psi0);
  Vector state_at(double tau) const;

 private:
  const SpectralFactorization* fact_;
  std::vector<Vector> coeffs_;  // per block
};

// Convenience wrapper: U = exp(-i H tau) for a single time.
Matrix hermitian_propagator(const Matrix& h, double tau);

}  // namespace ddsense
