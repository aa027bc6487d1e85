#pragma once

// Shared oracles for the test suite. Everything here is deliberately
// independent of the library's propagator/solver code paths: matrix
// exponentials by scaled Taylor series, time-dependent evolution by RK4.

#include <complex>
#include <random>

#include "ddsense/spin_ops.hpp"

namespace ddsense::testing {

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// exp(-i h tau) by scaling-and-squaring with a plain Taylor series.
inline Matrix taylor_propagator(const Matrix& h, double tau) {
  const int dim = static_cast<int>(h.rows());
  Matrix a = Complex(0.0, -tau) * h;
  int squarings = 0;
  while (a.norm() > 0.25) {
    a *= 0.5;
    ++squarings;
  }
  Matrix result = Matrix::Identity(dim, dim);
  Matrix term = Matrix::Identity(dim, dim);
  for (int k = 1; k <= 30; ++k) {
    term = (term * a) / static_cast<double>(k);
    result += term;
  }
  for (int k = 0; k < squarings; ++k) result = result * result;
  return result;
}

// RK4 integration of i dpsi/dtau = h(tau) psi from tau0 to tau1.
template <typename HamFn>
Vector rk4_evolve(const HamFn& h_at, Vector psi, double tau0, double tau1,
                  double step) {
  const auto rhs = [&](double t, const Vector& v) -> Vector {
    return Complex(0.0, -1.0) * (h_at(t) * v);
  };
  double t = tau0;
  while (t < tau1 - 1e-15) {
    const double dt = std::min(step, tau1 - t);
    const Vector k1 = rhs(t, psi);
    const Vector k2 = rhs(t + 0.5 * dt, psi + 0.5 * dt * k1);
    const Vector k3 = rhs(t + 0.5 * dt, psi + 0.5 * dt * k2);
    const Vector k4 = rhs(t + dt, psi + dt * k3);
    psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += dt;
  }
  return psi;
}

inline Matrix random_hermitian(int dim, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = Complex(gauss(gen), gauss(gen));
  return 0.5 * (a + a.adjoint());
}

inline Vector random_state(int dim, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Complex(gauss(gen), gauss(gen));
  v.normalize();
  return v;
}

// Kolmogorov-Smirnov statistic of `sorted` sample against a CDF.
template <typename Cdf>
double ks_statistic(const std::vector<double>& sorted, const Cdf& cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max(d, std::max(f - i / n, (i + 1) / n - f));
  }
  return d;
}

}  // namespace ddsense::testing
