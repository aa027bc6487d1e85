#pragma once

#include <cmath>
#include <cstdint>
#include <Eigen/Dense>

namespace ddsense {

// Counter-based per-stream RNG (splitmix64 core). Stream q of a run with
// master seed m is fully determined by (m, q), so the sampled ensemble does
// not depend on thread scheduling. All variate transforms are hand-rolled to
// keep results identical across standard libraries.
class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t stream) {
    state_ = mix(seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
    state_ = mix(state_ ^ mix(stream + 0x6a09e667f3bcc909ULL));
  }

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // uniform on (0,1), never exactly 0 or 1
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // standard exponential deviate
  double exponential() { return -std::log(uniform()); }

  // isotropic unit vector
  Eigen::Vector3d unit_vector() {
    const double z = 2.0 * uniform() - 1.0;
    const double phi = 2.0 * M_PI * uniform();
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
  }

 private:
  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t state_;
};

}  // namespace ddsense
