#include "ddsense/hamiltonians.hpp"

#include <cmath>
#include <stdexcept>

namespace ddsense {

void ProtocolParams::validate() const {
  if (protocol == Protocol::RF) {
    if (!(rf_bias >= 0.0) || !std::isfinite(rf_bias)) {
      throw std::invalid_argument("RF bias field must be finite and >= 0");
    }
    if (model == Model::Full) {
      throw std::invalid_argument("RF protocol is defined on the secular model");
    }
  }
  if (model == Model::Full && !(omega_ratio > 0.0)) {
    throw std::invalid_argument("full model requires omega_L/omega_dd > 0");
  }
}

namespace {

struct PairTermBuilder {
  SpinMatrices ops;
  std::vector<Matrix> kron;  // kron[3a+b] = s_a (x) s_b, (d^2 x d^2)

  explicit PairTermBuilder(const SpinSpecies& species) : ops(spin_operators(species)) {
    const Matrix* s[3] = {&ops.sx, &ops.sy, &ops.sz};
    const int d = static_cast<int>(ops.sx.rows());
    kron.reserve(9);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        Matrix m(d * d, d * d);
        for (int r1 = 0; r1 < d; ++r1)
          for (int r2 = 0; r2 < d; ++r2)
            for (int c1 = 0; c1 < d; ++c1)
              for (int c2 = 0; c2 < d; ++c2)
                m(r1 * d + r2, c1 * d + c2) = (*s[a])(r1, c1) * (*s[b])(r2, c2);
        kron.push_back(std::move(m));
      }
    }
  }

  // sum_ab coupling(a,b) s_a (x) s_b
  Matrix contract(const Mat3& coupling) const {
    Matrix out = Matrix::Zero(kron[0].rows(), kron[0].cols());
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        if (coupling(a, b) != 0.0) out += coupling(a, b) * kron[3 * a + b];
    return out;
  }
};

void check_positions(const ClusterGeometry& c) {
  if (min_pair_distance(c) <= 0.0) {
    throw std::invalid_argument("cluster has coincident positions");
  }
}

}  // namespace

Matrix rotating_dd_hamiltonian(const ClusterGeometry& c, const SpinSpecies& species,
                               double phase) {
  const int m = c.size();
  const int dim = hilbert_dim(species, m);
  Matrix h = Matrix::Zero(dim, dim);
  if (m < 2) return h;
  check_positions(c);

  const PairTermBuilder builder(species);
  const double s2 = species.s * species.s;
  const double cp = std::cos(phase), sp = std::sin(phase);

  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const Vec3 r = c.positions[i] - c.positions[j];
      const double u = r.norm();
      Vec3 n = r / u;
      // R_z(phase) applied to the pair direction
      n = Vec3(cp * n.x() - sp * n.y(), sp * n.x() + cp * n.y(), n.z());
      // one term per unordered pair; the 4pi of the dipole kernel stays
      // explicit because the time unit omega_dd carries none
      const double coeff = 1.0 / (4.0 * M_PI * s2 * u * u * u);
      const Mat3 coupling = coeff * (Mat3::Identity() - 3.0 * n * n.transpose());
      add_embedded_pair(h, builder.contract(coupling), i, j, m, species.local_dim());
    }
  }
  return h;
}

Matrix secular_dd_hamiltonian(const ClusterGeometry& c, const SpinSpecies& species) {
  const int m = c.size();
  const int dim = hilbert_dim(species, m);
  Matrix h = Matrix::Zero(dim, dim);
  if (m < 2) return h;
  check_positions(c);

  const PairTermBuilder builder(species);
  const double s2 = species.s * species.s;
  // azimuthal average of (1 - 3 n n^T): (3 s_z s_z - s.s) weighted by
  // (1 - 3 n_z^2)/2
  Mat3 structure = -Mat3::Identity();
  structure(2, 2) += 3.0;

  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const Vec3 r = c.positions[i] - c.positions[j];
      const double u = r.norm();
      const double nz2 = (r.z() / u) * (r.z() / u);
      const double coeff =
          1.0 / (4.0 * M_PI * s2 * u * u * u) * 0.5 * (1.0 - 3.0 * nz2);
      add_embedded_pair(h, builder.contract(coeff * structure), i, j, m,
                        species.local_dim());
    }
  }
  return h;
}

Matrix rf_drive(const SpinSpecies& species, int n_sites, double b_rf) {
  if (!std::isfinite(b_rf)) throw std::invalid_argument("RF amplitude must be finite");
  const int dim = hilbert_dim(species, n_sites);
  Matrix h = Matrix::Zero(dim, dim);
  if (b_rf == 0.0) return h;
  const SpinMatrices ops = spin_operators(species);
  // rotating-wave amplitude: a lab drive b cos(wt) is a static b/2 here
  const Matrix term = -0.5 * b_rf * ops.sx;
  for (int i = 0; i < n_sites; ++i) {
    h += embed_operator(term, i, n_sites);
  }
  return h;
}

}  // namespace ddsense
