#pragma once

#include <cstdint>
#include <vector>

#include "hubnav/fusion/session.hpp"
#include "hubnav/sim/simulator.hpp"

namespace hubnav::fusion {

/// One Monte-Carlo fusion run against simulated truth.
struct MonteCarloRun {
  std::uint64_t seed = 0;
  double mean_position_nees = 0.0;  // 3-dof, time-averaged after settling
  double mean_posvel_nees = 0.0;    // 6-dof
  double final_horizontal_error = 0.0;  // m
  double min_cov_eigenvalue = 0.0;      // most negative seen, scaled by trace
  bool cov_symmetric = true;
  std::size_t nees_epochs = 0;
};

struct MonteCarloSummary {
  std::vector<MonteCarloRun> runs;
  double mean_position_nees = 0.0;
  double mean_posvel_nees = 0.0;
};

/// Simulate and fuse `count` seeds starting at config.sim.seed. The initial
/// navigation state is perturbed per the configured initial sigmas (and the
/// installation estimate starts at the configured values, not truth). NEES is
/// evaluated at the log epochs against the IMU-point truth, skipping the
/// first `settle` seconds.
MonteCarloSummary run_monte_carlo(const geo::EarthModel& earth,
                                  io::RunConfig config, int count,
                                  double settle = 20.0);

}  // namespace hubnav::fusion
