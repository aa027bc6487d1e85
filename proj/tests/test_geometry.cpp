#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ddsense/geometry.hpp"
#include "test_helpers.hpp"

using namespace ddsense;
using namespace ddsense::testing;

namespace {
constexpr double kFourPiThirds = 4.0 * M_PI / 3.0;
// KS acceptance threshold at alpha = 0.01: D * sqrt(n) < 1.628
constexpr double kKs01 = 1.628;
}  // namespace

TEST_CASE("k-NN ball volumes follow the Gamma law (KS, n = 1e5)") {
  const int n = 100000;
  std::vector<double> v1, v2;
  v1.reserve(n);
  v2.reserve(n);
  for (int q = 0; q < n; ++q) {
    RngStream rng(12345, static_cast<uint64_t>(q));
    const ClusterGeometry c = sample_cluster(3, rng);
    v1.push_back(kFourPiThirds * std::pow(c.radius(1), 3));
    v2.push_back(kFourPiThirds * std::pow(c.radius(2), 3));
  }
  std::sort(v1.begin(), v1.end());
  std::sort(v2.begin(), v2.end());

  // nearest neighbor: V1 ~ Exp(1); second: V2 ~ Gamma(2,1)
  const double d1 = ks_statistic(v1, [](double x) { return 1.0 - std::exp(-x); });
  const double d2 = ks_statistic(
      v2, [](double x) { return 1.0 - std::exp(-x) * (1.0 + x); });
  CHECK(d1 * std::sqrt(double(n)) < kKs01);
  CHECK(d2 * std::sqrt(double(n)) < kKs01);
}

TEST_CASE("mean nearest-neighbor distance matches the closed form") {
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int q = 0; q < n; ++q) {
    RngStream rng(777, static_cast<uint64_t>(q));
    const ClusterGeometry c = sample_cluster(2, rng);
    const double r = c.radius(1);
    sum += r;
    sum2 += r * r;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  const double expected = std::tgamma(4.0 / 3.0) * std::cbrt(3.0 / (4.0 * M_PI));
  CHECK(std::abs(mean - expected) < 3.0 * se);
}

TEST_CASE("construction agrees with a rejection-box Poisson oracle") {
  // oracle: homogeneous PPP of unit density in a box, sorted distances from
  // the origin; independent RNG (std::mt19937)
  std::mt19937 gen(2024);
  const double half = 2.5;
  const double volume = std::pow(2.0 * half, 3);
  std::poisson_distribution<int> count(volume);
  std::uniform_real_distribution<double> coord(-half, half);

  const int n = 40000;
  double oracle_sum1 = 0.0, oracle_sq1 = 0.0, oracle_sum2 = 0.0, oracle_sq2 = 0.0;
  for (int q = 0; q < n; ++q) {
    std::vector<double> r;
    const int k = count(gen);
    r.reserve(k);
    for (int i = 0; i < k; ++i) {
      const Vec3 p(coord(gen), coord(gen), coord(gen));
      r.push_back(p.norm());
    }
    std::sort(r.begin(), r.end());
    REQUIRE(r.size() >= 2);  // huge box, vanishing failure probability
    oracle_sum1 += r[0];
    oracle_sq1 += r[0] * r[0];
    oracle_sum2 += r[1];
    oracle_sq2 += r[1] * r[1];
  }

  double sum1 = 0.0, sq1 = 0.0, sum2 = 0.0, sq2 = 0.0;
  for (int q = 0; q < n; ++q) {
    RngStream rng(31, static_cast<uint64_t>(q));
    const ClusterGeometry c = sample_cluster(3, rng);
    sum1 += c.radius(1);
    sq1 += c.radius(1) * c.radius(1);
    sum2 += c.radius(2);
    sq2 += c.radius(2) * c.radius(2);
  }

  const auto se = [&](double s, double s2) {
    const double m = s / n;
    return std::sqrt(std::max(0.0, s2 / n - m * m) / n);
  };
  const double tol1 =
      3.0 * std::hypot(se(oracle_sum1, oracle_sq1), se(sum1, sq1));
  const double tol2 =
      3.0 * std::hypot(se(oracle_sum2, oracle_sq2), se(sum2, sq2));
  CHECK(std::abs(sum1 / n - oracle_sum1 / n) < tol1);
  CHECK(std::abs(sum2 / n - oracle_sum2 / n) < tol2);
}

TEST_CASE("geometry layout: origin first, sorted radii") {
  RngStream rng(5, 17);
  const ClusterGeometry c = sample_cluster(6, rng);
  CHECK(c.positions[0].norm() == 0.0);
  for (int k = 2; k < c.size(); ++k) CHECK(c.radius(k) >= c.radius(k - 1));
}

TEST_CASE("min_distance floor is honored without bias elsewhere") {
  const double floor = 0.4;
  for (uint64_t q = 0; q < 200; ++q) {
    RngStream rng(8, q);
    const ClusterGeometry c = sample_cluster(4, rng, floor);
    CHECK(min_pair_distance(c) >= floor);
  }
}

TEST_CASE("density rescaling shrinks positions by lambda^-1/3") {
  RngStream rng(44, 0);
  const ClusterGeometry c = sample_cluster(3, rng);
  const double lambda = 8.0;
  const ClusterGeometry r = rescale_cluster(c, lambda);
  for (int k = 0; k < c.size(); ++k) {
    CHECK((r.positions[k] - 0.5 * c.positions[k]).norm() < 1e-15);
  }
  CHECK_THROWS_AS(rescale_cluster(c, 0.0), std::invalid_argument);
}

TEST_CASE("cluster CSV schema") {
  RngStream rng(1, 0);
  std::vector<ClusterGeometry> cs{sample_cluster(2, rng)};
  std::ostringstream out;
  write_clusters_csv(out, cs);
  CHECK(out.str().rfind("cluster_index,site_index,x,y,z\n", 0) == 0);
}
