// Scratch harness used while bringing the simulator up; replaced by the CLI.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "dtnlab/sim.hpp"

using namespace dtnlab;

int main(int argc, char** argv) {
  double lambda = argc > 1 ? std::atof(argv[1]) : 550.0;
  int runs = argc > 2 ? std::atoi(argv[2]) : 100;
  double deadline = argc > 3 ? std::atof(argv[3]) : 25.0;
  double d = argc > 4 ? std::atof(argv[4]) : 0.0;
  double R = argc > 5 ? std::atof(argv[5]) : 50.0;
  double dt = argc > 6 ? std::atof(argv[6]) : 0.0;

  SimConfig cfg;
  cfg.density = lambda;
  cfg.side = 5000.0;
  cfg.range = R;
  cfg.mobility.kind = MobilityKind::RandomDirection;
  cfg.mobility.v_min = 0.0;
  cfg.mobility.v_max = 1.0;
  cfg.mobility.travel_time = 120.0;
  cfg.transfer_delay = d;
  cfg.dt = dt;
  cfg.horizon = deadline;
  cfg.seed = 20260810;

  auto t0 = std::chrono::steady_clock::now();
  auto result = run_ensemble(cfg, runs, cfg.seed, TraceMode::DeliveryOnly);
  auto t1 = std::chrono::steady_clock::now();
  double secs = std::chrono::duration<double>(t1 - t0).count();
  std::printf(
      "lambda=%g R=%g d=%g M=%d runs=%d  p(0)=%.4f p(%g)=%.4f  n0_mean=%.1f  [%.1f s]\n",
      lambda, R, d, cfg.resolved_node_count(), runs, ps(result.stats, 0.0),
      deadline, ps(result.stats, deadline), result.stats.n0_mean, secs);
  return 0;
}
