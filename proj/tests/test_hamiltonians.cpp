#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "ddsense/hamiltonians.hpp"
#include "ddsense/propagator.hpp"
#include "test_helpers.hpp"

using namespace ddsense;
using namespace ddsense::testing;

namespace {

ClusterGeometry pair_geometry(const Vec3& r) {
  ClusterGeometry c;
  c.positions = {Vec3::Zero(), r};
  return c;
}

Eigen::VectorXd eigenvalues(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  return solver.eigenvalues();
}

}  // namespace

TEST_CASE("two-spin secular spectrum matches the analytic result") {
  // 3 s1z s2z - s1.s2 on two spins-1/2 has eigenvalues {1/2, 1/2, -1, 0}
  // (triplet m=+-1, triplet m=0, singlet); the secular Hamiltonian scales
  // them by zeta = (1 - 3 nz^2) / (8 pi s^2 u^3)
  SpinSpecies species;
  species.s = 0.5;
  for (uint64_t q = 0; q < 20; ++q) {
    RngStream rng(3, q);
    const Vec3 r = (0.3 + rng.uniform()) * rng.unit_vector();
    const double u = r.norm();
    const double nz2 = (r.z() / u) * (r.z() / u);
    const double zeta =
        (1.0 - 3.0 * nz2) / (8.0 * M_PI * species.s * species.s * u * u * u);

    std::vector<double> expected = {-zeta, 0.0, 0.5 * zeta, 0.5 * zeta};
    std::sort(expected.begin(), expected.end());

    const Eigen::VectorXd ev = eigenvalues(secular_dd_hamiltonian(pair_geometry(r), species));
    for (int k = 0; k < 4; ++k) {
      CHECK(std::abs(ev(k) - expected[k]) < 1e-12 * std::max(1.0, std::abs(zeta)));
    }
  }
}

TEST_CASE("secular Hamiltonian equals the 256-point Larmor-cycle average") {
  for (double s : {0.5, 1.0}) {
    SpinSpecies species;
    species.s = s;
    RngStream rng(17, static_cast<uint64_t>(2 * s));
    const ClusterGeometry geom = sample_cluster(3, rng);

    const int n_phi = 256;
    Matrix avg = Matrix::Zero(hilbert_dim(species, 3), hilbert_dim(species, 3));
    for (int k = 0; k < n_phi; ++k) {
      avg += rotating_dd_hamiltonian(geom, species, 2.0 * M_PI * k / n_phi);
    }
    avg /= static_cast<double>(n_phi);

    const Matrix secular = secular_dd_hamiltonian(geom, species);
    CHECK((avg - secular).norm() < 1e-10 * std::max(1.0, secular.norm()));
  }
}

TEST_CASE("magic angle zeroes the secular coupling") {
  SpinSpecies species;
  species.s = 0.5;
  const double nz = 1.0 / std::sqrt(3.0);
  const double rho_xy = std::sqrt(1.0 - nz * nz);
  const Vec3 r = 0.7 * Vec3(rho_xy * std::cos(1.1), rho_xy * std::sin(1.1), nz);
  CHECK(secular_dd_hamiltonian(pair_geometry(r), species).norm() < 1e-12);
}

TEST_CASE("density rescaling multiplies the Hamiltonian by exactly lambda") {
  SpinSpecies species;
  species.s = 1.0;
  RngStream rng(23, 4);
  const ClusterGeometry geom = sample_cluster(3, rng);
  for (double lambda : {0.5, 2.0, 17.0}) {
    const ClusterGeometry scaled = rescale_cluster(geom, lambda);
    const Matrix h0 = secular_dd_hamiltonian(geom, species);
    const Matrix h1 = secular_dd_hamiltonian(scaled, species);
    CHECK((h1 - lambda * h0).norm() < 1e-12 * lambda * h0.norm());
    const Matrix f0 = rotating_dd_hamiltonian(geom, species, 0.4);
    const Matrix f1 = rotating_dd_hamiltonian(scaled, species, 0.4);
    CHECK((f1 - lambda * f0).norm() < 1e-12 * lambda * f0.norm());
  }
}

TEST_CASE("secular Hamiltonian commutes with total Sz") {
  SpinSpecies species;
  species.s = 1.0;
  RngStream rng(29, 1);
  const ClusterGeometry geom = sample_cluster(3, rng);
  const int m = geom.size();
  const SpinMatrices ops = spin_operators(species);
  Matrix sz_tot = Matrix::Zero(hilbert_dim(species, m), hilbert_dim(species, m));
  for (int i = 0; i < m; ++i) sz_tot += embed_operator(ops.sz, i, m);

  const Matrix h = secular_dd_hamiltonian(geom, species);
  CHECK((h * sz_tot - sz_tot * h).norm() < 1e-12 * std::max(1.0, h.norm()));
  CHECK(hermiticity_error(h) < 1e-14);
  CHECK(hermiticity_error(rotating_dd_hamiltonian(geom, species, 0.9)) < 1e-14);
}

TEST_CASE("rotating Hamiltonian: 2pi periodicity and z-rotation covariance") {
  SpinSpecies species;
  species.s = 0.5;
  RngStream rng(31, 2);
  const ClusterGeometry geom = sample_cluster(3, rng);

  const Matrix a = rotating_dd_hamiltonian(geom, species, 0.37);
  const Matrix b = rotating_dd_hamiltonian(geom, species, 0.37 + 2.0 * M_PI);
  CHECK((a - b).norm() < 1e-12 * a.norm());

  // rotating the geometry about z by phi equals advancing the phase by phi
  const double phi = 1.234;
  ClusterGeometry rotated = geom;
  const double c = std::cos(phi), s = std::sin(phi);
  for (Vec3& p : rotated.positions) {
    p = Vec3(c * p.x() - s * p.y(), s * p.x() + c * p.y(), p.z());
  }
  const Matrix via_phase = rotating_dd_hamiltonian(geom, species, phi);
  const Matrix via_geometry = rotating_dd_hamiltonian(rotated, species, 0.0);
  CHECK((via_phase - via_geometry).norm() < 1e-12 * via_phase.norm());
}

TEST_CASE("spherical average of the dipolar coupling cancels") {
  // the coupling kernel (I - 3 n n^T) is traceless and averages to zero over
  // isotropic orientations at fixed distance, with MC residual ~ n^-1/2
  RngStream rng(41, 0);
  Mat3 acc = Mat3::Zero();
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const Vec3 nv = rng.unit_vector();
    acc += Mat3::Identity() - 3.0 * nv * nv.transpose();
  }
  acc /= static_cast<double>(n);
  CHECK(std::abs(acc.trace()) < 1e-12);
  CHECK(acc.norm() < 5.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("RF drive term and protocol validation") {
  SpinSpecies species;
  species.s = 1.0;
  const SpinMatrices ops = spin_operators(species);
  const int m = 2;
  Matrix expected = Matrix::Zero(9, 9);
  for (int i = 0; i < m; ++i) expected += embed_operator(-0.005 * ops.sx, i, m);
  CHECK((rf_drive(species, m, 0.01) - expected).norm() < 1e-14);
  CHECK(rf_drive(species, m, 0.0).norm() == 0.0);

  ProtocolParams p;
  p.protocol = Protocol::RF;
  p.model = Model::Full;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.model = Model::Secular;
  CHECK_NOTHROW(p.validate());

  ProtocolParams full;
  full.protocol = Protocol::DC;
  full.model = Model::Full;
  full.omega_ratio = -1.0;
  CHECK_THROWS_AS(full.validate(), std::invalid_argument);
}

TEST_CASE("SI boundary: omega_dd and unit round trips") {
  UnitSystem units;
  units.rho = 1e21;
  units.species.s = 0.5;
  units.species.gamma = 1.76e11;
  // omega_dd = s^2 gamma^2 hbar mu0 rho
  const double expected =
      0.25 * 1.76e11 * 1.76e11 * kHbar * kMu0 * 1e21;
  CHECK(units.omega_dd() == doctest::Approx(expected).epsilon(1e-12));

  const double t = 3.7e-6;
  CHECK(units.seconds_from_tau(units.tau_from_seconds(t)) ==
        doctest::Approx(t).epsilon(1e-12));
  const double field = 2.5e-9;
  CHECK(units.tesla_from_b(units.b_from_tesla(field)) ==
        doctest::Approx(field).epsilon(1e-12));

  // scaling rho by lambda scales omega_dd linearly
  UnitSystem dense = units;
  dense.rho *= 5.0;
  CHECK(dense.omega_dd() == doctest::Approx(5.0 * units.omega_dd()).epsilon(1e-12));
}
