#include "ddsense/spin_ops.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ddsense {

void SpinSpecies::validate() const {
  const double two_s = 2.0 * s;
  if (s < 0.5 - 1e-12 || std::abs(two_s - std::lround(two_s)) > 1e-9) {
    throw std::invalid_argument("spin quantum number must be a half-integer >= 1/2, got " +
                                std::to_string(s));
  }
  if (!std::isfinite(gamma)) {
    throw std::invalid_argument("gyromagnetic ratio must be finite");
  }
}

SpinMatrices spin_operators(const SpinSpecies& species) {
  species.validate();
  const int d = species.local_dim();
  const double s = species.s;
  SpinMatrices ops;
  ops.sx = Matrix::Zero(d, d);
  ops.sy = Matrix::Zero(d, d);
  ops.sz = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const double m = s - k;
    ops.sz(k, k) = m;
    if (k + 1 < d) {
      // <s,m| S+ |s,m-1> with m-1 = s-(k+1)
      const double mp = s - (k + 1);
      const double c = std::sqrt(s * (s + 1.0) - mp * (mp + 1.0));
      ops.sx(k, k + 1) = 0.5 * c;
      ops.sx(k + 1, k) = 0.5 * c;
      ops.sy(k, k + 1) = Complex(0.0, -0.5) * c;
      ops.sy(k + 1, k) = Complex(0.0, 0.5) * c;
    }
  }
  return ops;
}

int hilbert_dim(const SpinSpecies& species, int n_sites) {
  species.validate();
  if (n_sites < 1) throw std::invalid_argument("need at least one site");
  const int d = species.local_dim();
  long dim = 1;
  for (int i = 0; i < n_sites; ++i) {
    dim *= d;
    if (dim > kMaxHilbertDim) {
      throw std::invalid_argument("Hilbert dimension " + std::to_string(d) + "^" +
                                  std::to_string(n_sites) + " exceeds the dense ceiling of " +
                                  std::to_string(kMaxHilbertDim));
    }
  }
  return static_cast<int>(dim);
}

namespace {

// stride of `site` in row-major digit order (site 0 is the slowest digit)
long site_stride(int site, int n_sites, int local_dim) {
  long stride = 1;
  for (int i = n_sites - 1; i > site; --i) stride *= local_dim;
  return stride;
}

long pow_long(int base, int exp) {
  long v = 1;
  for (int i = 0; i < exp; ++i) v *= base;
  return v;
}

}  // namespace

Matrix embed_operator(const Matrix& op, int site, int n_sites) {
  if (op.rows() != op.cols()) throw std::invalid_argument("operator must be square");
  const int d = static_cast<int>(op.rows());
  if (site < 0 || site >= n_sites) throw std::invalid_argument("site index out of range");
  const long dim = pow_long(d, n_sites);
  if (dim > kMaxHilbertDim) throw std::invalid_argument("embedding exceeds the dense ceiling");
  const long stride = site_stride(site, n_sites, d);

  Matrix out = Matrix::Zero(dim, dim);
  for (long col = 0; col < dim; ++col) {
    const int digit = static_cast<int>((col / stride) % d);
    const long base = col - digit * stride;
    for (int a = 0; a < d; ++a) {
      const Complex v = op(a, digit);
      if (v != Complex(0.0, 0.0)) out(base + a * stride, col) += v;
    }
  }
  return out;
}

void add_embedded_pair(Matrix& h, const Matrix& pair_op, int site_i, int site_j,
                       int n_sites, int local_dim) {
  const int d = local_dim;
  if (pair_op.rows() != d * d || pair_op.cols() != d * d) {
    throw std::invalid_argument("pair operator has wrong dimension");
  }
  if (site_i == site_j || site_i < 0 || site_j < 0 || site_i >= n_sites || site_j >= n_sites) {
    throw std::invalid_argument("invalid pair of sites");
  }
  const long dim = h.rows();
  const long stride_i = site_stride(site_i, n_sites, d);
  const long stride_j = site_stride(site_j, n_sites, d);

  for (long col = 0; col < dim; ++col) {
    const int di = static_cast<int>((col / stride_i) % d);
    const int dj = static_cast<int>((col / stride_j) % d);
    const long base = col - di * stride_i - dj * stride_j;
    for (int ai = 0; ai < d; ++ai) {
      for (int aj = 0; aj < d; ++aj) {
        const Complex v = pair_op(ai * d + aj, di * d + dj);
        if (v != Complex(0.0, 0.0)) h(base + ai * stride_i + aj * stride_j, col) += v;
      }
    }
  }
}

void apply_site_operator(const Matrix& op, int site, int n_sites,
                         const Vector& psi, Vector& out, Complex weight) {
  const int d = static_cast<int>(op.rows());
  const long dim = psi.size();
  const long stride = site_stride(site, n_sites, d);
  for (long n = 0; n < dim; ++n) {
    const int digit = static_cast<int>((n / stride) % d);
    const long base = n - digit * stride;
    Complex acc(0.0, 0.0);
    for (int b = 0; b < d; ++b) {
      acc += op(digit, b) * psi(base + b * stride);
    }
    out(n) += weight * acc;
  }
}

Vector apply_collective(const Matrix& op, int n_sites, const Vector& psi) {
  Vector out = Vector::Zero(psi.size());
  for (int i = 0; i < n_sites; ++i) {
    apply_site_operator(op, i, n_sites, psi, out);
  }
  return out;
}

Vector coherent_product_state(const Vec3& axis, const SpinSpecies& species,
                              int n_sites) {
  const double norm = axis.norm();
  if (norm < 1e-14) throw std::invalid_argument("polarization axis must be nonzero");
  const Vec3 a = axis / norm;
  const int d = hilbert_dim(species, n_sites);
  const int dl = species.local_dim();

  // single-site state: rotate the maximal Sz eigenstate onto the axis
  Vector single = Vector::Zero(dl);
  if (a.z() > 1.0 - 1e-14) {
    single(0) = 1.0;
  } else if (a.z() < -1.0 + 1e-14) {
    single(dl - 1) = 1.0;
  } else {
    const SpinMatrices ops = spin_operators(species);
    const Vec3 u = Vec3(0, 0, 1).cross(a).normalized();
    const double theta = std::acos(a.z());
    const Matrix gen = u.x() * ops.sx + u.y() * ops.sy + u.z() * ops.sz;
    // exp(-i theta u.S) |m=s>, via the eigendecomposition of the generator
    Eigen::SelfAdjointEigenSolver<Matrix> es(gen);
    Vector coeff = es.eigenvectors().adjoint().col(0);
    for (int k = 0; k < dl; ++k) {
      coeff(k) = std::conj(es.eigenvectors()(0, k)) *
                 std::exp(Complex(0.0, -theta * es.eigenvalues()(k)));
    }
    single = es.eigenvectors() * coeff;
  }

  Vector state = Vector::Ones(1);
  for (int i = 0; i < n_sites; ++i) {
    Vector next(state.size() * dl);
    for (long n = 0; n < state.size(); ++n) {
      for (int k = 0; k < dl; ++k) next(n * dl + k) = state(n) * single(k);
    }
    state = std::move(next);
  }
  state /= state.norm();
  (void)d;
  return state;
}

}  // namespace ddsense
