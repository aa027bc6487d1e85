// Benchmark: OpenMP cluster loop vs the serial reference on a fixed DC
// secular workload, checking that both agree on er_min.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "ddsense/ensemble.hpp"

using namespace ddsense;

int main(int argc, char** argv) {
  long q_clusters = 4000;
  if (argc > 1) q_clusters = std::atol(argv[1]);

  ExperimentConfig config;
  config.species.s = 0.5;
  config.cluster_size = 2;
  config.n_clusters = q_clusters;
  config.protocol.protocol = Protocol::DC;
  config.protocol.model = Model::Secular;
  config.seed = 42;

  std::printf("workload: DC secular, s=1/2, M=2, Q=%ld, %d tau points\n", q_clusters,
              config.grid.points);

  const ExperimentResult serial = run_experiment(config, 1, /*serial=*/true);
  std::printf("serial reference: %8.3f s   er_min = %.6f\n", serial.wall_seconds,
              serial.curve.er_min);

  const ExperimentResult parallel = run_experiment(config, 0, /*serial=*/false);
  std::printf("openmp (%d thr):  %8.3f s   er_min = %.6f\n", parallel.threads_used,
              parallel.wall_seconds, parallel.curve.er_min);

  const double rel =
      std::abs(parallel.curve.er_min - serial.curve.er_min) /
      std::max(1e-300, std::abs(serial.curve.er_min));
  std::printf("speedup: %.2fx, relative er_min difference: %.3e\n",
              serial.wall_seconds / std::max(1e-9, parallel.wall_seconds), rel);
  if (rel > 1e-10) {
    std::printf("FAIL: parallel and serial results disagree beyond 1e-10\n");
    return 1;
  }
  std::printf("OK\n");
  return 0;
}
