#include "ddsense/propagator.hpp"

#include <lapacke.h>

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace ddsense {

double hermiticity_error(const Matrix& h) {
  const double scale = std::max(1.0, h.norm());
  return (h - h.adjoint()).norm() / scale;
}

namespace {

// connected components of the nonzero pattern (union-find)
std::vector<int> component_labels(const Matrix& h, double tol) {
  const int n = static_cast<int>(h.rows());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (int c = 0; c < n; ++c) {
    for (int r = c + 1; r < n; ++r) {
      if (std::abs(h(r, c)) > tol) {
        const int a = find(r), b = find(c);
        if (a != b) parent[a] = b;
      }
    }
  }
  std::vector<int> label(n);
  for (int i = 0; i < n; ++i) label[i] = find(i);
  return label;
}

void eigendecompose(Matrix& a, Eigen::VectorXd& w) {
  const int n = static_cast<int>(a.rows());
  w.resize(n);
  const int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, 'V', 'L', n,
      reinterpret_cast<lapack_complex_double*>(a.data()), n, w.data());
  if (info != 0) {
    // zheevd occasionally fails on ill-conditioned input; zheev is sturdier
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    if (es.info() != Eigen::Success) {
      throw std::runtime_error("Hermitian eigendecomposition failed");
    }
    w = es.eigenvalues();
    a = es.eigenvectors();
  }
}

}  // namespace

SpectralFactorization::SpectralFactorization(const Matrix& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("matrix must be square");
  if (hermiticity_error(h) > 1e-10) {
    throw std::invalid_argument("matrix is not Hermitian within tolerance");
  }
  dim_ = static_cast<int>(h.rows());

  const double tol = 1e-14 * std::max(1.0, h.cwiseAbs().maxCoeff());
  const std::vector<int> label = component_labels(h, tol);

  std::vector<int> seen;
  for (int i = 0; i < dim_; ++i) {
    if (std::find(seen.begin(), seen.end(), label[i]) == seen.end()) seen.push_back(label[i]);
  }
  blocks_.reserve(seen.size());
  for (int lab : seen) {
    Block blk;
    for (int i = 0; i < dim_; ++i) {
      if (label[i] == lab) blk.index.push_back(i);
    }
    const int m = static_cast<int>(blk.index.size());
    Matrix sub(m, m);
    for (int c = 0; c < m; ++c) {
      for (int r = 0; r < m; ++r) {
        // symmetrize: downstream unitarity then holds to machine precision
        sub(r, c) = 0.5 * (h(blk.index[r], blk.index[c]) +
                           std::conj(h(blk.index[c], blk.index[r])));
      }
    }
    eigendecompose(sub, blk.evals);
    blk.evecs = std::move(sub);
    blocks_.push_back(std::move(blk));
  }
}

Matrix SpectralFactorization::propagator(double tau) const {
  Matrix u = Matrix::Zero(dim_, dim_);
  for (const Block& blk : blocks_) {
    const int m = static_cast<int>(blk.index.size());
    Matrix phased = blk.evecs;
    for (int k = 0; k < m; ++k) {
      phased.col(k) *= std::exp(Complex(0.0, -tau * blk.evals(k)));
    }
    const Matrix sub = phased * blk.evecs.adjoint();
    for (int c = 0; c < m; ++c) {
      for (int r = 0; r < m; ++r) u(blk.index[r], blk.index[c]) = sub(r, c);
    }
  }
  return u;
}

Vector SpectralFactorization::evolve(const Vector& psi, double tau) const {
  if (psi.size() != dim_) throw std::invalid_argument("state dimension mismatch");
  return SpectralEvolver(*this, psi).state_at(tau);
}

SpectralEvolver::SpectralEvolver(const SpectralFactorization& fact, const Vector& psi0)
    : fact_(&fact) {
  if (psi0.size() != fact.dim()) throw std::invalid_argument("state dimension mismatch");
  coeffs_.reserve(fact.blocks().size());
  for (const auto& blk : fact.blocks()) {
    const int m = static_cast<int>(blk.index.size());
    Vector sub(m);
    for (int r = 0; r < m; ++r) sub(r) = psi0(blk.index[r]);
    coeffs_.push_back(blk.evecs.adjoint() * sub);
  }
}

Vector SpectralEvolver::state_at(double tau) const {
  Vector out = Vector::Zero(fact_->dim());
  for (size_t b = 0; b < coeffs_.size(); ++b) {
    const auto& blk = fact_->blocks()[b];
    const int m = static_cast<int>(blk.index.size());
    Vector phased(m);
    for (int k = 0; k < m; ++k) {
      phased(k) = coeffs_[b](k) * std::exp(Complex(0.0, -tau * blk.evals(k)));
    }
    const Vector sub = blk.evecs * phased;
    for (int r = 0; r < m; ++r) out(blk.index[r]) = sub(r);
  }
  return out;
}

Matrix hermitian_propagator(const Matrix& h, double tau) {
  return SpectralFactorization(h).propagator(tau);
}

}  // namespace ddsense
