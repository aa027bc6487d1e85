#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "ddsense/rng.hpp"
#include "ddsense/spin_ops.hpp"

namespace ddsense {

// Positions of one cluster, dimensionless (lengths in units of rho^-1/3).
// positions[0] is the origin; the rest are sorted by distance from it.
struct ClusterGeometry {
  std::vector<Vec3> positions;

  int size() const { return static_cast<int>(positions.size()); }
  double radius(int k) const { return positions[k].norm(); }
};

// Exact k-nearest-neighbor sample of a unit-density Poisson point process
// around the origin: cumulative ball volumes are sums of standard
// exponentials, directions are isotropic.
ClusterGeometry sample_cluster(int n_spins, RngStream& rng);

// Same, but resampled until all pairwise distances are >= min_distance.
// min_distance = 0 leaves the PPP untouched.
ClusterGeometry sample_cluster(int n_spins, RngStream& rng, double min_distance);

// Density rescaling rho -> lambda*rho: positions shrink by lambda^-1/3.
ClusterGeometry rescale_cluster(const ClusterGeometry& c, double lambda);

double min_pair_distance(const ClusterGeometry& c);

// CSV dump: cluster_index,site_index,x,y,z
void write_clusters_csv(std::ostream& out, std::span<const ClusterGeometry> clusters);

}  // namespace ddsense
