#include "hubnav/fusion/montecarlo.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "hubnav/geo/rotation.hpp"
#include "hubnav/sim/random.hpp"

namespace hubnav::fusion {

MonteCarloSummary run_monte_carlo(const geo::EarthModel& earth,
                                  io::RunConfig config, int count,
                                  double settle) {
  MonteCarloSummary summary;
  const std::uint64_t base_seed = config.sim.seed;

  for (int run_idx = 0; run_idx < count; ++run_idx) {
    config.sim.seed = base_seed + static_cast<std::uint64_t>(run_idx);
    sim::Simulator simulator(earth, config.sim);

    config.install.measured_radius = simulator.measured_radius();
    config.initial_heading = config.sim.trajectory.initial_heading;
    const ins::NavState truth0 = simulator.imu_nav_state(0.0);

    // Initial estimate: truth perturbed per the configured sigmas.
    sim::GaussianStream draw(config.sim.seed ^ 0x5bf03635dc1e8a7dull);
    const io::InitialStd& istd = config.initial_std;
    eskf::FullState init;
    init.install = config.install;
    const Eigen::Vector3d dp(draw.next(istd.position), draw.next(istd.position),
                             draw.next(istd.position));
    const Eigen::Vector3d dv(draw.next(istd.velocity), draw.next(istd.velocity),
                             draw.next(istd.velocity));
    const Eigen::Vector3d datt(draw.next(istd.attitude_horizontal),
                               draw.next(istd.attitude_horizontal),
                               draw.next(istd.attitude_heading));
    init.nav.pos = geo::offset_geodetic(earth, truth0.pos, dp);
    init.nav.vel = truth0.vel + dv;
    const double psi_w_true =
        config.sim.trajectory.initial_heading + M_PI / 2.0;
    init.nav.att = geo::exp_so3(datt) * geo::rotation_z(psi_w_true) *
                   wheel::body_to_wheel_rotation(config.install.mounting);

    MonteCarloRun stats;
    stats.seed = config.sim.seed;
    stats.min_cov_eigenvalue = 0.0;
    double sum_nees3 = 0.0, sum_nees6 = 0.0;

    auto on_log = [&](const FusionSession& session) {
      const double t = session.time();
      const eskf::Covariance& cov = session.covariance();
      const double sym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
      if (sym > 1e-12 * std::max(cov.trace(), 1.0)) {
        stats.cov_symmetric = false;
      }
      Eigen::SelfAdjointEigenSolver<eskf::Covariance> eig(cov);
      stats.min_cov_eigenvalue =
          std::min(stats.min_cov_eigenvalue,
                   eig.eigenvalues().minCoeff() / std::max(cov.trace(), 1e-30));
      if (t - session.nav_log().front().t < settle) return;

      const ins::NavState ref = simulator.imu_nav_state(t);
      const Eigen::Vector3d e_p =
          geo::ned_displacement(earth, ref.pos, session.state().nav.pos);
      const Eigen::Vector3d e_v = session.state().nav.vel - ref.vel;
      const Eigen::Matrix3d p_pos = cov.block<3, 3>(0, 0);
      sum_nees3 += e_p.dot(p_pos.ldlt().solve(e_p));
      Eigen::Matrix<double, 6, 1> e6;
      e6 << e_p, e_v;
      const Eigen::Matrix<double, 6, 6> p6 = cov.block<6, 6>(0, 0);
      sum_nees6 += e6.dot(p6.ldlt().solve(e6));
      ++stats.nees_epochs;
    };

    const std::vector<ins::ImuSample> imu = simulator.synthesize_imu();
    const std::vector<wheel::GnssFix> gnss = simulator.synthesize_gnss();
    const FusionResult result =
        run_fusion(earth, config, init, imu, gnss, FusionSession::Disable(), on_log);

    if (stats.nees_epochs > 0) {
      stats.mean_position_nees =
          sum_nees3 / static_cast<double>(stats.nees_epochs);
      stats.mean_posvel_nees =
          sum_nees6 / static_cast<double>(stats.nees_epochs);
    }
    const ins::NavState truth_end =
        simulator.imu_nav_state(result.final_state.nav.t);
    stats.final_horizontal_error =
        geo::ned_displacement(earth, truth_end.pos, result.final_state.nav.pos)
            .head<2>()
            .norm();
    summary.runs.push_back(stats);
    summary.mean_position_nees += stats.mean_position_nees;
    summary.mean_posvel_nees += stats.mean_posvel_nees;
  }

  if (!summary.runs.empty()) {
    summary.mean_position_nees /= static_cast<double>(summary.runs.size());
    summary.mean_posvel_nees /= static_cast<double>(summary.runs.size());
  }
  return summary;
}

}  // namespace hubnav::fusion
