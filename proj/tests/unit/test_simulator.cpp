#include <cmath>
#include <cstring>

#include <gtest/gtest.h>

#include "hubnav/geo/rotation.hpp"
#include "hubnav/ins/mechanization.hpp"
#include "hubnav/sim/simulator.hpp"

using namespace hubnav;

namespace {

const geo::EarthModel kEarth;
constexpr double kDeg = geo::kDegToRad;

sim::TrajectorySpec base_spec() {
  sim::TrajectorySpec spec;
  spec.origin = {30.0 * kDeg, 114.0 * kDeg, 20.0};
  spec.initial_heading = 0.4;
  spec.accel_limit = 1.0;
  return spec;
}

sim::SimConfig clean_config(const sim::TrajectorySpec& spec) {
  sim::SimConfig cfg;
  cfg.trajectory = spec;
  cfg.zero_errors();
  return cfg;
}

}  // namespace

TEST(Trajectory, StraightSegmentGeometry) {
  sim::TrajectorySpec spec = base_spec();
  spec.segments = {sim::Segment::straight(100.0, 2.0)};
  const sim::TrajectoryModel model(kEarth, spec, 0.3);

  EXPECT_NEAR(model.total_distance(), 100.0, 1e-9);
  EXPECT_NEAR(model.wheel_angle(model.duration()), 100.0 / 0.3, 1e-9);

  const Eigen::Vector2d end = model.planar_position(model.duration());
  EXPECT_NEAR(end.x(), 100.0 * std::cos(spec.initial_heading), 1e-9);
  EXPECT_NEAR(end.y(), 100.0 * std::sin(spec.initial_heading), 1e-9);
  // The exact NED displacement differs by the curvature drop ~ d^2 / (2 R).
  const Eigen::Vector3d ned = geo::ned_displacement(
      kEarth, spec.origin, model.wheel_position(model.duration()));
  EXPECT_NEAR(ned.head<2>().norm(), 100.0, 1e-3);
  EXPECT_NEAR(ned.z(), 100.0 * 100.0 / (2.0 * kEarth.semi_major_axis), 3e-4);
}

TEST(Trajectory, FullCircleCloses) {
  sim::TrajectorySpec spec = base_spec();
  const double radius = 600.0 / (2.0 * M_PI);
  spec.segments = {sim::Segment::arc(radius, 2.0 * M_PI, 2.0)};
  const sim::TrajectoryModel model(kEarth, spec, 0.3);

  const Eigen::Vector3d closure = geo::ned_displacement(
      kEarth, spec.origin, model.wheel_position(model.duration()));
  EXPECT_LT(closure.norm(), 1e-6);
  EXPECT_NEAR(geo::wrap_pi(model.heading(model.duration()) -
                           spec.initial_heading),
              0.0, 1e-12);
}

TEST(Trajectory, ArcHeadingRate) {
  sim::TrajectorySpec spec = base_spec();
  spec.segments = {sim::Segment::arc(20.0, -M_PI / 2.0, 2.0)};
  const sim::TrajectoryModel model(kEarth, spec, 0.3);
  // Sample mid-arc, past the speed ramp.
  const double t = 0.6 * model.duration();
  EXPECT_NEAR(model.yaw_rate(t), -2.0 / 20.0, 1e-12);
}

TEST(Trajectory, DwellHoldsPosition) {
  sim::TrajectorySpec spec = base_spec();
  spec.segments = {sim::Segment::dwell(5.0),
                   sim::Segment::straight(10.0, 1.0)};
  const sim::TrajectoryModel model(kEarth, spec, 0.3);
  EXPECT_EQ(model.speed(2.0), 0.0);
  EXPECT_EQ(model.distance(4.999), 0.0);
  EXPECT_GT(model.speed(6.0), 0.0);
}

TEST(Trajectory, PositionDerivativeMatchesVelocity) {
  sim::TrajectorySpec spec = base_spec();
  spec.segments = {sim::Segment::dwell(1.0), sim::Segment::straight(30.0, 2.0),
                   sim::Segment::arc(15.0, 1.2, 1.5)};
  const sim::TrajectoryModel model(kEarth, spec, 0.3);
  for (double t = 0.5; t < model.duration() - 0.5; t += 1.37) {
    const double d = 5e-4;
    const Eigen::Vector3d fd =
        (geo::ned_displacement(kEarth, model.wheel_position(t - d),
                               model.wheel_position(t + d))) /
        (2.0 * d);
    EXPECT_LT((fd - model.wheel_velocity(t)).norm(), 1e-5) << "t=" << t;
  }
}

TEST(Trajectory, InfeasibleSpecRejected) {
  sim::TrajectorySpec spec = base_spec();
  spec.segments = {sim::Segment::straight(1.0, 10.0),
                   sim::Segment::straight(100.0, 10.0)};  // cannot reach 10 m/s in 1 m
  EXPECT_THROW(sim::TrajectoryModel(kEarth, spec, 0.3), std::invalid_argument);

  sim::TrajectorySpec empty = base_spec();
  EXPECT_THROW(sim::TrajectoryModel(kEarth, empty, 0.3),
               std::invalid_argument);
}

TEST(Simulator, StationaryStatics) {
  sim::TrajectorySpec spec = base_spec();
  spec.segments = {sim::Segment::dwell(10.0)};
  sim::SimConfig cfg = clean_config(spec);
  cfg.mounting_true = {-1.22 * kDeg, 1.60 * kDeg};
  const sim::Simulator simulator(kEarth, cfg);
  const auto imu = simulator.synthesize_imu();
  ASSERT_GT(imu.size(), 100u);

  const Eigen::Matrix3d att = simulator.truth_at(5.0).att;
  const geo::EarthRates rates = geo::earth_rates(
      kEarth, simulator.imu_position(5.0), Eigen::Vector3d::Zero());
  const Eigen::Vector3d expected_gyro = att.transpose() * rates.omega_ie_n;
  const Eigen::Vector3d expected_accel =
      att.transpose() *
      Eigen::Vector3d(0, 0, -geo::normal_gravity(kEarth, spec.origin));

  const ins::ImuSample mid = imu[imu.size() / 2];
  EXPECT_LT((mid.gyro - expected_gyro).norm(), 1e-8);
  EXPECT_LT((mid.accel - expected_accel).norm(), 1e-8);
}

TEST(Simulator, StraightRollingSpinRate) {
  sim::TrajectorySpec spec = base_spec();
  spec.segments = {sim::Segment::straight(60.0, 2.0)};
  sim::SimConfig cfg = clean_config(spec);
  const sim::Simulator simulator(kEarth, cfg);
  const auto imu = simulator.synthesize_imu();

  const ins::ImuSample mid = imu[imu.size() / 2];  // cruising
  EXPECT_NEAR(mid.gyro.x(), 2.0 / 0.3, 1e-4);
  EXPECT_LT(std::abs(mid.gyro.y()), 1e-4);
  EXPECT_LT(std::abs(mid.gyro.z()), 1e-3);
}

TEST(Simulator, LeverarmCentripetalAcceleration) {
  sim::TrajectorySpec spec = base_spec();
  spec.segments = {sim::Segment::straight(90.0, 3.0)};
  sim::SimConfig cfg = clean_config(spec);
  cfg.leverarm_true = {0.03, 0.04};  // |l| = 0.05 m
  const sim::Simulator simulator(kEarth, cfg);
  const auto imu = simulator.synthesize_imu();

  // At 3 m/s and r = 0.3 the spin is 10 rad/s, so the IMU feels a rotating
  // centripetal term of w^2 |l| = 5 m/s^2 on top of the gravity reaction.
  const double spin = 3.0 / 0.3;
  const double expected = spin * spin * 0.05;
  double worst = 0.0;
  for (std::size_t i = imu.size() / 2; i < imu.size() / 2 + 200; ++i) {
    const double t = imu[i].t;
    const Eigen::Vector3d f_n = simulator.truth_at(t).att * imu[i].accel;
    const Eigen::Vector3d g(0, 0,
                            geo::normal_gravity(kEarth, simulator.imu_position(t)));
    worst = std::max(worst, (f_n + g).norm());
  }
  EXPECT_NEAR(worst, expected, 0.01 * expected);
}

TEST(Simulator, GnssMatchesTruthWithoutNoiseOrLever) {
  sim::TrajectorySpec spec = base_spec();
  spec.segments = {sim::Segment::dwell(2.0), sim::Segment::straight(20.0, 2.0)};
  sim::SimConfig cfg = clean_config(spec);
  const sim::Simulator simulator(kEarth, cfg);
  for (const wheel::GnssFix& fix : simulator.synthesize_gnss()) {
    const Eigen::Vector3d err = geo::ned_displacement(
        kEarth, simulator.model().wheel_position(fix.t), fix.pos);
    EXPECT_LT(err.norm(), 1e-9);
  }
}

TEST(Simulator, AntennaHeightConstantWhileImuHeightOscillates) {
  sim::TrajectorySpec spec = base_spec();
  spec.segments = {sim::Segment::straight(40.0, 2.0)};
  sim::SimConfig cfg = clean_config(spec);
  cfg.leverarm_true = {0.02, 0.03};
  cfg.antenna_lever_v = {0.6, 0.4, -1.2};
  const sim::Simulator simulator(kEarth, cfg);

  double antenna_min = 1e9, antenna_max = -1e9;
  double rel_min = 1e9, rel_max = -1e9;
  for (const wheel::GnssFix& fix : simulator.synthesize_gnss()) {
    antenna_min = std::min(antenna_min, fix.pos.height);
    antenna_max = std::max(antenna_max, fix.pos.height);
    const double rel = fix.pos.height - simulator.imu_position(fix.t).height;
    rel_min = std::min(rel_min, rel);
    rel_max = std::max(rel_max, rel);
  }
  // The antenna rides on the vehicle: constant height. The IMU spins with
  // the wheel, so the antenna-to-IMU height difference oscillates with the
  // wheel-plane leverarm amplitude.
  EXPECT_LT(antenna_max - antenna_min, 1e-9);
  EXPECT_NEAR(rel_max - rel_min, 2.0 * std::hypot(0.02, 0.03), 1e-3);
}

TEST(Simulator, OutageWindowsOnlyRemoveFixes) {
  sim::TrajectorySpec spec = base_spec();
  spec.segments = {sim::Segment::straight(120.0, 2.0)};
  sim::SimConfig cfg = clean_config(spec);
  cfg.gnss_std_m = 0.02;
  cfg.seed = 77;

  sim::SimConfig with_outage = cfg;
  with_outage.outage_windows = {{10.0, 25.0}};

  const auto baseline = sim::Simulator(kEarth, cfg).synthesize_gnss();
  const auto gappy = sim::Simulator(kEarth, with_outage).synthesize_gnss();

  std::size_t j = 0;
  for (const wheel::GnssFix& fix : baseline) {
    if (fix.t >= 10.0 && fix.t < 25.0) continue;
    ASSERT_LT(j, gappy.size());
    EXPECT_EQ(std::memcmp(&fix.pos, &gappy[j].pos, sizeof(fix.pos)), 0);
    EXPECT_EQ(fix.t, gappy[j].t);
    ++j;
  }
  EXPECT_EQ(j, gappy.size());
  for (const wheel::GnssFix& fix : gappy) {
    EXPECT_FALSE(fix.t >= 10.0 && fix.t < 25.0);
  }
}

TEST(Simulator, BitReproducibleWithFixedSeed) {
  sim::TrajectorySpec spec = base_spec();
  spec.segments = {sim::Segment::dwell(1.0), sim::Segment::straight(30.0, 2.0)};
  sim::SimConfig cfg;
  cfg.trajectory = spec;
  cfg.seed = 1234;

  const auto a = sim::Simulator(kEarth, cfg).synthesize_imu();
  const auto b = sim::Simulator(kEarth, cfg).synthesize_imu();
  ASSERT_EQ(a.size(), b.size());
  EXPECT_EQ(std::memcmp(a.data(), b.data(),
                        a.size() * sizeof(ins::ImuSample)),
            0);

  cfg.seed = 1235;
  const auto c = sim::Simulator(kEarth, cfg).synthesize_imu();
  EXPECT_NE(std::memcmp(a.data(), c.data(),
                        a.size() * sizeof(ins::ImuSample)),
            0);
}

TEST(Simulator, GyroNoiseMatchesConfiguredDensity) {
  sim::TrajectorySpec spec = base_spec();
  spec.segments = {sim::Segment::dwell(600.0)};
  sim::SimConfig cfg;
  cfg.trajectory = spec;
  cfg.gyro_bias_std = 0.0;
  cfg.gyro_scale_std = 0.0;
  cfg.accel_bias_std = 0.0;
  cfg.accel_scale_std = 0.0;
  cfg.seed = 99;
  const sim::Simulator simulator(kEarth, cfg);
  const auto imu = simulator.synthesize_imu();

  const Eigen::Vector3d expected_gyro =
      simulator.truth_at(1.0).att.transpose() *
      geo::earth_rates(kEarth, spec.origin, Eigen::Vector3d::Zero()).omega_ie_n;
  double sum2 = 0.0;
  for (const ins::ImuSample& s : imu) {
    sum2 += std::pow(s.gyro.x() - expected_gyro.x(), 2);
  }
  const double sample_std = std::sqrt(sum2 / static_cast<double>(imu.size()));
  const double expected_std =
      cfg.angle_random_walk * std::sqrt(cfg.imu_rate_hz);
  EXPECT_NEAR(sample_std / expected_std, 1.0, 0.05);
}

TEST(Simulator, RoundTripStraight) {
  sim::TrajectorySpec spec = base_spec();
  spec.segments = {sim::Segment::dwell(2.0),
                   sim::Segment::straight(100.0, 2.0)};
  const sim::SimConfig cfg = clean_config(spec);
  EXPECT_LT(sim::Simulator(kEarth, cfg).roundtrip_check(), 1e-3);
}

TEST(Simulator, RoundTripDwell) {
  sim::TrajectorySpec spec = base_spec();
  spec.segments = {sim::Segment::dwell(20.0)};
  const sim::SimConfig cfg = clean_config(spec);
  EXPECT_LT(sim::Simulator(kEarth, cfg).roundtrip_check(), 1e-6);
}

TEST(Simulator, RoundTripImprovesWithImuRate) {
  sim::TrajectorySpec spec = base_spec();
  spec.segments = {sim::Segment::dwell(2.0),
                   sim::Segment::straight(80.0, 2.0),
                   sim::Segment::arc(20.0, 1.0, 2.0)};
  sim::SimConfig cfg = clean_config(spec);
  cfg.imu_rate_hz = 100.0;
  const double coarse = sim::Simulator(kEarth, cfg).roundtrip_check();
  cfg.imu_rate_hz = 200.0;
  const double fine = sim::Simulator(kEarth, cfg).roundtrip_check();
  EXPECT_GT(coarse / fine, 2.0);
}
