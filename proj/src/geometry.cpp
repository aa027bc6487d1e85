#include "ddsense/geometry.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace ddsense {

ClusterGeometry sample_cluster(int n_spins, RngStream& rng) {
  if (n_spins < 1) throw std::invalid_argument("cluster needs at least one spin");
  ClusterGeometry c;
  c.positions.reserve(n_spins);
  c.positions.push_back(Vec3::Zero());
  double volume = 0.0;
  for (int k = 1; k < n_spins; ++k) {
    volume += rng.exponential();
    const double r = std::cbrt(3.0 * volume / (4.0 * M_PI));
    c.positions.push_back(r * rng.unit_vector());
  }
  return c;
}

ClusterGeometry sample_cluster(int n_spins, RngStream& rng, double min_distance) {
  if (min_distance <= 0.0) return sample_cluster(n_spins, rng);
  for (;;) {
    ClusterGeometry c = sample_cluster(n_spins, rng);
    if (n_spins < 2 || min_pair_distance(c) >= min_distance) return c;
  }
}

ClusterGeometry rescale_cluster(const ClusterGeometry& c, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("rescale factor must be positive");
  const double f = std::pow(lambda, -1.0 / 3.0);
  ClusterGeometry out;
  out.positions.reserve(c.positions.size());
  for (const Vec3& p : c.positions) out.positions.push_back(f * p);
  return out;
}

double min_pair_distance(const ClusterGeometry& c) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < c.size(); ++i) {
    for (int j = i + 1; j < c.size(); ++j) {
      best = std::min(best, (c.positions[i] - c.positions[j]).norm());
    }
  }
  return best;
}

void write_clusters_csv(std::ostream& out, std::span<const ClusterGeometry> clusters) {
  out << "cluster_index,site_index,x,y,z\n";
  for (size_t q = 0; q < clusters.size(); ++q) {
    for (int i = 0; i < clusters[q].size(); ++i) {
      const Vec3& p = clusters[q].positions[i];
      out << q << ',' << i << ',' << p.x() << ',' << p.y() << ',' << p.z() << '\n';
    }
  }
}

}  // namespace ddsense
