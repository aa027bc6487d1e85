#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ddsense/spin_ops.hpp"
#include "test_helpers.hpp"

using namespace ddsense;
using namespace ddsense::testing;

namespace {
const Complex kI(0.0, 1.0);
}

TEST_CASE("angular momentum algebra for several s") {
  for (double s : {0.5, 1.0, 1.5, 2.0, 3.0}) {
    SpinSpecies species;
    species.s = s;
    const SpinMatrices ops = spin_operators(species);
    const int d = species.local_dim();
    CHECK(ops.sx.rows() == d);

    CHECK((ops.sx * ops.sy - ops.sy * ops.sx - kI * ops.sz).norm() < 1e-12);
    CHECK((ops.sy * ops.sz - ops.sz * ops.sy - kI * ops.sx).norm() < 1e-12);
    CHECK((ops.sz * ops.sx - ops.sx * ops.sz - kI * ops.sy).norm() < 1e-12);

    const Matrix casimir =
        ops.sx * ops.sx + ops.sy * ops.sy + ops.sz * ops.sz;
    CHECK((casimir - s * (s + 1.0) * Matrix::Identity(d, d)).norm() < 1e-12);

    // hermiticity and sz diagonal s..-s
    CHECK((ops.sx - ops.sx.adjoint()).norm() < 1e-14);
    CHECK((ops.sy - ops.sy.adjoint()).norm() < 1e-14);
    CHECK(std::abs(ops.sz(0, 0).real() - s) < 1e-14);
    CHECK(std::abs(ops.sz(d - 1, d - 1).real() + s) < 1e-14);
  }
}

TEST_CASE("species validation and Hilbert ceiling") {
  SpinSpecies bad;
  bad.s = 0.7;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.s = -0.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  SpinSpecies ok;
  ok.s = 0.5;
  CHECK(hilbert_dim(ok, 12) == 4096);
  CHECK_THROWS_AS(hilbert_dim(ok, 13), std::invalid_argument);
}

TEST_CASE("embed_operator matches explicit Kronecker products") {
  SpinSpecies species;
  species.s = 0.5;
  const SpinMatrices ops = spin_operators(species);
  const Matrix id = Matrix::Identity(2, 2);

  CHECK((embed_operator(ops.sy, 0, 3) - kron(kron(ops.sy, id), id)).norm() < 1e-14);
  CHECK((embed_operator(ops.sy, 1, 3) - kron(kron(id, ops.sy), id)).norm() < 1e-14);
  CHECK((embed_operator(ops.sy, 2, 3) - kron(kron(id, id), ops.sy)).norm() < 1e-14);
}

TEST_CASE("add_embedded_pair matches Kronecker construction, both orderings") {
  SpinSpecies species;
  species.s = 1.0;
  const SpinMatrices ops = spin_operators(species);
  const int d = species.local_dim();
  const Matrix id = Matrix::Identity(d, d);
  const int dim = d * d * d;

  const Matrix pair_op = kron(ops.sx, ops.sz);  // site i first factor

  Matrix h = Matrix::Zero(dim, dim);
  add_embedded_pair(h, pair_op, 0, 2, 3, d);
  CHECK((h - kron(kron(ops.sx, id), ops.sz)).norm() < 1e-13);

  h.setZero();
  add_embedded_pair(h, pair_op, 2, 0, 3, d);
  CHECK((h - kron(kron(ops.sz, id), ops.sx)).norm() < 1e-13);

  h.setZero();
  add_embedded_pair(h, pair_op, 1, 2, 3, d);
  add_embedded_pair(h, pair_op, 1, 2, 3, d);  // accumulates
  CHECK((h - 2.0 * kron(kron(id, ops.sx), ops.sz)).norm() < 1e-13);
}

TEST_CASE("matrix-free application agrees with dense embedding") {
  SpinSpecies species;
  species.s = 1.0;
  const SpinMatrices ops = spin_operators(species);
  const int m = 3;
  const int dim = hilbert_dim(species, m);
  const Vector psi = random_state(dim, 11);

  for (int site = 0; site < m; ++site) {
    Vector out = Vector::Zero(dim);
    apply_site_operator(ops.sy, site, m, psi, out, Complex(2.0, 0.5));
    const Vector dense = Complex(2.0, 0.5) * (embed_operator(ops.sy, site, m) * psi);
    CHECK((out - dense).norm() < 1e-13);
  }

  Matrix collective = Matrix::Zero(dim, dim);
  for (int site = 0; site < m; ++site) collective += embed_operator(ops.sx, site, m);
  CHECK((apply_collective(ops.sx, m, psi) - collective * psi).norm() < 1e-13);
}

TEST_CASE("coherent product state is normalized and fully polarized") {
  for (double s : {0.5, 1.5}) {
    SpinSpecies species;
    species.s = s;
    const int m = 3;
    const SpinMatrices ops = spin_operators(species);
    const Vec3 axes[] = {{1, 0, 0}, {0, 0, 1}, {0, 0, -1}, {0.3, -0.4, 0.5}};
    for (Vec3 axis : axes) {
      const Vector psi = coherent_product_state(axis, species, m);
      CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
      axis.normalize();
      const Vec3 mean(
          std::real(psi.dot(apply_collective(ops.sx, m, psi))),
          std::real(psi.dot(apply_collective(ops.sy, m, psi))),
          std::real(psi.dot(apply_collective(ops.sz, m, psi))));
      CHECK((mean - m * s * axis).norm() < 1e-10);
    }
  }
}
