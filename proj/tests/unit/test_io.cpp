#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "hubnav/geo/rotation.hpp"
#include "hubnav/io/config.hpp"
#include "hubnav/io/formats.hpp"

using namespace hubnav;

namespace {

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("hubnav_test_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string path(const std::string& name) const {
    return (dir_ / name).string();
  }
  void write_file(const std::string& name, const std::string& content) const {
    std::ofstream out(path(name));
    out << content;
  }

  std::filesystem::path dir_;
};

using IoFormats = TempDir;
using Config = TempDir;

}  // namespace

TEST_F(IoFormats, ImuExactFields) {
  write_file("imu.txt",
             "# header\n"
             "0.005 0.1 -0.2 0.3 0.01 0.02 -9.8\n"
             "0.010 0.2 -0.3 0.4 0.03 0.04 -9.7\n"
             "0.015 0.3 -0.4 0.5 0.05 0.06 -9.6\n");
  const auto samples = io::parse_imu(path("imu.txt"));
  ASSERT_EQ(samples.size(), 3u);
  EXPECT_EQ(samples[0].t, 0.005);
  EXPECT_EQ(samples[1].gyro.y(), -0.3);
  EXPECT_EQ(samples[2].accel.z(), -9.6);
}

TEST_F(IoFormats, WrongColumnCountNamesLine) {
  write_file("imu.txt",
             "0.005 0.1 -0.2 0.3 0.01 0.02 -9.8\n"
             "0.010 0.2 -0.3 0.4 0.03\n");
  try {
    io::parse_imu(path("imu.txt"));
    FAIL() << "expected FormatError";
  } catch (const io::FormatError& e) {
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("columns"), std::string::npos);
  }
}

TEST_F(IoFormats, NonMonotonicTimestampRejected) {
  write_file("imu.txt",
             "1.0 0 0 0 0 0 -9.8\n"
             "1.0 0 0 0 0 0 -9.8\n");
  EXPECT_THROW(io::parse_imu(path("imu.txt")), io::FormatError);
}

TEST_F(IoFormats, NonNumericFieldRejected) {
  write_file("imu.txt", "0.1 0 zero 0 0 0 -9.8\n");
  EXPECT_THROW(io::parse_imu(path("imu.txt")), io::FormatError);
}

TEST_F(IoFormats, LineLengthCapEnforced) {
  std::string long_line(8000, '1');
  write_file("imu.txt", long_line + "\n");
  EXPECT_THROW(io::parse_imu(path("imu.txt")), io::FormatError);
}

TEST_F(IoFormats, MissingFileReported) {
  EXPECT_THROW(io::parse_gnss(path("nope.txt")), io::FormatError);
}

TEST_F(IoFormats, TrajectoryRoundTripAtPrintedPrecision) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<sim::TruthRecord> records;
  for (int i = 0; i < 1000; ++i) {
    sim::TruthRecord r;
    r.t = 0.1 * i;
    r.pos = {0.6 * u(rng), 2.0 * u(rng), 30.0 + 10.0 * u(rng)};
    r.vel = {3.0 * u(rng), 3.0 * u(rng), 0.1 * u(rng)};
    r.att = geo::euler_to_rotation({2.0 * u(rng), 1.2 * u(rng), 3.0 * u(rng)});
    records.push_back(r);
  }
  io::write_trajectory(path("traj.txt"), records);
  const auto back = io::parse_trajectory(path("traj.txt"));
  ASSERT_EQ(back.size(), records.size());

  // 9 decimals on degrees: ~1e-10 rad on angles, ~1.2e-9 m of arc on
  // positions. 4 decimals on meters and m/s.
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_NEAR(back[i].pos.lat, records[i].pos.lat, 1e-11);
    EXPECT_NEAR(back[i].pos.lon, records[i].pos.lon, 1e-11);
    EXPECT_NEAR(back[i].pos.height, records[i].pos.height, 5.1e-5);
    EXPECT_LT((back[i].vel - records[i].vel).cwiseAbs().maxCoeff(), 5.1e-5);
    EXPECT_LT(geo::log_so3(back[i].att * records[i].att.transpose()).norm(),
              1e-9);
  }

  // Writing the re-parsed records again reproduces the file byte-for-byte.
  io::write_trajectory(path("traj2.txt"), back);
  std::ifstream a(path("traj.txt")), b(path("traj2.txt"));
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
}

TEST_F(IoFormats, GnssAndParamLogRoundTrip) {
  std::vector<wheel::GnssFix> fixes;
  for (int i = 0; i < 50; ++i) {
    wheel::GnssFix f;
    f.t = i * 1.0;
    f.pos = {0.52 + 1e-6 * i, 1.99 - 1e-6 * i, 21.0 + 0.01 * i};
    f.std = Eigen::Vector3d(0.02, 0.03, 0.05);
    fixes.push_back(f);
  }
  io::write_gnss(path("gnss.txt"), fixes);
  const auto fixes_back = io::parse_gnss(path("gnss.txt"));
  ASSERT_EQ(fixes_back.size(), fixes.size());
  EXPECT_NEAR(fixes_back[7].pos.lat, fixes[7].pos.lat, 1e-11);
  EXPECT_EQ(fixes_back[7].std, fixes[7].std);

  std::vector<io::ParamLogRecord> params;
  for (int i = 0; i < 50; ++i) {
    io::ParamLogRecord p;
    p.t = 0.1 * i;
    p.leverarm = {0.0201, -0.0302};
    p.mounting = {-0.0213, 0.0279};
    p.radius_scale = 0.00497;
    p.leverarm_std = {0.01, 0.01};
    p.mounting_std = {0.001, 0.002};
    p.radius_scale_std = 0.0001;
    params.push_back(p);
  }
  io::write_param_log(path("params.txt"), params);
  const auto params_back = io::parse_param_log(path("params.txt"));
  ASSERT_EQ(params_back.size(), params.size());
  EXPECT_NEAR(params_back[3].mounting.x(), params[3].mounting.x(), 1e-10);
  EXPECT_NEAR(params_back[3].radius_scale, params[3].radius_scale, 1e-8);
}

TEST_F(IoFormats, EmptyStreamWritesHeaderOnly) {
  io::write_imu(path("imu.txt"), {});
  std::ifstream in(path("imu.txt"));
  std::string line;
  ASSERT_TRUE(static_cast<bool>(std::getline(in, line)));
  EXPECT_EQ(line.front(), '#');
  EXPECT_FALSE(static_cast<bool>(std::getline(in, line)));
  EXPECT_TRUE(io::parse_imu(path("imu.txt")).empty());
}

TEST_F(Config, MinimalConfigAppliesDefaults) {
  write_file("run.ini",
             "[installation]\n"
             "wheel_radius_m = 0.3015\n");
  const io::RunConfig cfg = io::parse_config(path("run.ini"));
  EXPECT_EQ(cfg.install.measured_radius, 0.3015);
  EXPECT_EQ(cfg.velocity_update_hz, 2.0);
  EXPECT_EQ(cfg.gnss_rate_hz, 1.0);
  EXPECT_NEAR(cfg.process_noise.angle_random_walk, 6.981317e-5, 1e-10);
  EXPECT_NEAR(cfg.process_noise.gyro_bias_std, 9.696274e-4, 1e-9);
  EXPECT_EQ(cfg.process_noise.gyro_bias_tau, 3600.0);
  EXPECT_NEAR(cfg.initial_std.mounting, 2.0 * geo::kDegToRad, 1e-12);
  EXPECT_TRUE(cfg.estimate_mounting);
  EXPECT_TRUE(cfg.wheel_rate_constraint);
  EXPECT_EQ(cfg.chi_square_confidence, 0.995);
  EXPECT_NEAR(cfg.turn_gate.threshold, 0.5 * geo::kDegToRad, 1e-12);
  EXPECT_NEAR(cfg.fixer.std_threshold, 0.05 * geo::kDegToRad, 1e-12);
  EXPECT_EQ(cfg.fixer.hold_time, 10.0);
  // Derived wheel-rate sigma: ARW at the velocity-update interval.
  EXPECT_NEAR(cfg.sigma_wheel_rate,
              cfg.process_noise.angle_random_walk * std::sqrt(2.0), 1e-12);
}

TEST_F(Config, GnssRateParsesAsHertz) {
  write_file("run.ini",
             "[installation]\nwheel_radius_m = 0.3\n"
             "[rates]\ngnss_rate_hz = 1\n");
  EXPECT_EQ(io::parse_config(path("run.ini")).gnss_rate_hz, 1.0);
}

TEST_F(Config, MisspelledKeyNamed) {
  write_file("run.ini",
             "[installation]\n"
             "wheel_radus = 0.3\n");
  try {
    io::parse_config(path("run.ini"));
    FAIL() << "expected ConfigError";
  } catch (const io::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("installation.wheel_radus"),
              std::string::npos);
  }
}

TEST_F(Config, MissingRequiredKeyReported) {
  write_file("run.ini", "[rates]\nvelocity_update_hz = 2\n");
  try {
    io::parse_config(path("run.ini"));
    FAIL() << "expected ConfigError";
  } catch (const io::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("wheel_radius_m"), std::string::npos);
  }
}

TEST_F(Config, TypeMismatchReported) {
  write_file("run.ini", "[installation]\nwheel_radius_m = big\n");
  EXPECT_THROW(io::parse_config(path("run.ini")), io::ConfigError);
}

TEST_F(Config, DuplicateKeyRejected) {
  write_file("run.ini",
             "[installation]\nwheel_radius_m = 0.3\nwheel_radius_m = 0.4\n");
  EXPECT_THROW(io::parse_config(path("run.ini")), io::ConfigError);
}

TEST_F(Config, OutageWindowsAndSegmentsParse) {
  write_file("run.ini",
             "[installation]\nwheel_radius_m = 0.3\n"
             "[outages]\nwindows = 100:160, 300:360\n"
             "[trajectory]\n"
             "segment = dwell 5\n"
             "segment = straight 100 2.0\n"
             "segment = arc 25 -90 2.0\n");
  const io::RunConfig cfg = io::parse_config(path("run.ini"));
  ASSERT_EQ(cfg.outage_windows.size(), 2u);
  EXPECT_EQ(cfg.outage_windows[0], std::make_pair(100.0, 160.0));
  ASSERT_EQ(cfg.sim.trajectory.segments.size(), 3u);
  EXPECT_EQ(cfg.sim.trajectory.segments[0].type, sim::Segment::Type::kDwell);
  EXPECT_EQ(cfg.sim.trajectory.segments[1].length, 100.0);
  EXPECT_NEAR(cfg.sim.trajectory.segments[2].sweep, -M_PI / 2.0, 1e-12);
}

TEST_F(Config, MalformedOutageRejected) {
  write_file("run.ini",
             "[installation]\nwheel_radius_m = 0.3\n"
             "[outages]\nwindows = 160:100\n");
  EXPECT_THROW(io::parse_config(path("run.ini")), io::ConfigError);
}

TEST_F(Config, UnitConversionsApplied) {
  write_file("run.ini",
             "[installation]\nwheel_radius_m = 0.3\n"
             "mounting_pitch_deg = -1.22\n"
             "[process_noise]\ngyro_bias_std_dph = 200\narw_deg_sqrt_h = 0.24\n"
             "[simulation]\nvrw_mps_sqrt_h = 3\n");
  const io::RunConfig cfg = io::parse_config(path("run.ini"));
  EXPECT_NEAR(cfg.install.mounting.x(), -1.22 * geo::kDegToRad, 1e-12);
  EXPECT_NEAR(cfg.process_noise.gyro_bias_std,
              200.0 * geo::kDegToRad / 3600.0, 1e-12);
  EXPECT_NEAR(cfg.process_noise.angle_random_walk,
              0.24 * geo::kDegToRad / 60.0, 1e-12);
  EXPECT_NEAR(cfg.sim.velocity_random_walk, 0.05, 1e-12);
}
