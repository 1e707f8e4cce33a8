#include <cmath>
#include <cstring>
#include <functional>

#include <gtest/gtest.h>

#include "hubnav/geo/rotation.hpp"
#include "hubnav/ins/imu.hpp"
#include "hubnav/ins/mechanization.hpp"

using namespace hubnav;

namespace {

const geo::EarthModel kEarth;
constexpr double kDeg = geo::kDegToRad;

using InputFn = std::function<ins::ImuSample(double)>;

ins::NavState run_stream(const ins::NavState& initial, const InputFn& input,
                         double duration, double rate) {
  ins::NavState nav = initial;
  const double dt = 1.0 / rate;
  const auto steps = static_cast<long>(std::llround(duration * rate));
  ins::ImuSample prev = input(initial.t);
  for (long i = 1; i <= steps; ++i) {
    const ins::ImuSample cur = input(initial.t + static_cast<double>(i) * dt);
    nav = ins::propagate(kEarth, nav, prev, cur);
    prev = cur;
  }
  return nav;
}

}  // namespace

TEST(Compensate, ZeroErrorsIsIdentity) {
  ins::ImuSample raw;
  raw.t = 1.5;
  raw.gyro = {0.1, -0.2, 0.3};
  raw.accel = {0.5, 0.0, -9.8};
  const ins::ImuSample out = ins::compensate(raw, {});
  EXPECT_EQ(out.gyro, raw.gyro);
  EXPECT_EQ(out.accel, raw.accel);
}

TEST(Compensate, BiasOnly) {
  ins::ImuSample raw;
  raw.gyro = {0.101, 0.0, 0.0};
  ins::ImuErrors err;
  err.gyro_bias = {0.001, 0.0, 0.0};
  EXPECT_NEAR(ins::compensate(raw, err).gyro.x(), 0.1, 1e-15);
}

TEST(Compensate, InvertsForwardModel) {
  // Forward model: measured = (I + diag(s)) * true + bias.
  const Eigen::Vector3d truth(1.0, -2.0, 0.5);
  ins::ImuErrors err;
  err.gyro_scale = {0.01, -0.02, 0.003};
  err.gyro_bias = {0.002, -0.001, 0.0005};
  ins::ImuSample raw;
  raw.gyro = (Eigen::Vector3d::Ones() + err.gyro_scale).cwiseProduct(truth) +
             err.gyro_bias;
  EXPECT_LT((ins::compensate(raw, err).gyro - truth).norm(), 1e-12);
}

TEST(Compensate, RejectsNonInvertibleScale) {
  ins::ImuErrors err;
  err.accel_scale = {0.0, -1.0, 0.0};
  EXPECT_THROW(ins::compensate({}, err), std::invalid_argument);
}

TEST(Mechanization, RejectsBadTimestamps) {
  ins::NavState nav;
  ins::ImuSample a, b;
  a.t = 1.0;
  b.t = 1.0;
  EXPECT_THROW(ins::propagate(kEarth, nav, a, b), std::invalid_argument);
  b.t = 1.5;  // above the 0.02 s bound
  EXPECT_THROW(ins::propagate(kEarth, nav, a, b), std::invalid_argument);
}

TEST(Mechanization, StationarySixtySeconds) {
  ins::NavState nav;
  nav.pos = {30.0 * kDeg, 114.0 * kDeg, 25.0};
  nav.att = geo::euler_to_rotation({0.3, -0.1, 1.2});

  const geo::EarthRates rates =
      geo::earth_rates(kEarth, nav.pos, Eigen::Vector3d::Zero());
  const Eigen::Vector3d gravity(0, 0, geo::normal_gravity(kEarth, nav.pos));
  const Eigen::Vector3d gyro_in = nav.att.transpose() * rates.omega_ie_n;
  const Eigen::Vector3d accel_in = nav.att.transpose() * (-gravity);
  const InputFn input = [&](double t) {
    ins::ImuSample s;
    s.t = t;
    s.gyro = gyro_in;
    s.accel = accel_in;
    return s;
  };

  const ins::NavState out = run_stream(nav, input, 60.0, 200.0);
  const Eigen::Vector3d drift = geo::ned_displacement(kEarth, nav.pos, out.pos);
  EXPECT_LT(drift.norm(), 1e-3);
  EXPECT_LT(out.vel.norm(), 1e-4);
}

TEST(Mechanization, ConstantForwardAccelAgainstHighRateReference) {
  ins::NavState nav;
  nav.pos = {0.0, 0.0, 0.0};

  const double g0 = geo::normal_gravity(kEarth, nav.pos);
  const InputFn input = [&](double t) {
    ins::ImuSample s;
    s.t = t;
    s.gyro = Eigen::Vector3d::Zero();
    s.accel = {1.0, 0.0, -g0};
    return s;
  };

  const ins::NavState coarse = run_stream(nav, input, 10.0, 200.0);
  const ins::NavState reference = run_stream(nav, input, 10.0, 10000.0);

  EXPECT_NEAR(coarse.vel.x(), 10.0, 2e-2);  // Coriolis-sized correction
  EXPECT_LT((coarse.vel - reference.vel).norm(), 1e-4);
}

TEST(Mechanization, PureZRotationNinetyDegrees) {
  ins::NavState nav;
  nav.pos = {0.0, 0.0, 0.0};

  const double rate = 10.0 * kDeg;  // rad/s
  const double g0 = geo::normal_gravity(kEarth, nav.pos);
  const InputFn input = [&](double t) {
    ins::ImuSample s;
    s.t = t;
    s.gyro = {0.0, 0.0, rate};
    s.accel = {0.0, 0.0, -g0};  // earth rate deliberately absent
    return s;
  };

  const ins::NavState out = run_stream(nav, input, 9.0, 200.0);
  const geo::EulerResult euler = geo::rotation_to_euler(out.att);
  EXPECT_NEAR(euler.euler.yaw * geo::kRadToDeg, 90.0, 1e-6);
}

TEST(Mechanization, AttitudeStaysOrthonormalOverMillionSteps) {
  ins::NavState nav;
  nav.pos = {30.0 * kDeg, 0.0, 0.0};
  const double g0 = geo::normal_gravity(kEarth, nav.pos);

  ins::ImuSample prev;
  prev.t = 0.0;
  prev.gyro = {6.7, 0.02, -0.01};
  prev.accel = {0.2, 1.5, -g0};
  for (long i = 1; i <= 1000000; ++i) {
    ins::ImuSample cur = prev;
    cur.t = static_cast<double>(i) * 0.005;
    nav = ins::propagate(kEarth, nav, prev, cur);
    nav.vel.setZero();  // keep the state bounded; attitude is what matters
    prev = cur;
  }
  EXPECT_TRUE(geo::is_rotation(nav.att, 1e-9));
}

TEST(Mechanization, Deterministic) {
  ins::NavState nav;
  nav.pos = {45.0 * kDeg, 7.0 * kDeg, 300.0};
  const InputFn input = [&](double t) {
    ins::ImuSample s;
    s.t = t;
    s.gyro = {0.5 * std::sin(t), 0.2, 0.1 * std::cos(t)};
    s.accel = {0.3 * std::sin(t), -0.2, -9.8};
    return s;
  };
  const ins::NavState a = run_stream(nav, input, 5.0, 200.0);
  const ins::NavState b = run_stream(nav, input, 5.0, 200.0);
  EXPECT_EQ(std::memcmp(&a.pos, &b.pos, sizeof(a.pos)), 0);
  EXPECT_EQ(a.vel, b.vel);
  EXPECT_EQ(a.att, b.att);
}

TEST(Mechanization, HalvingStepAtLeastHalvesError) {
  ins::NavState nav;
  nav.pos = {45.0 * kDeg, 7.0 * kDeg, 300.0};
  const InputFn input = [&](double t) {
    ins::ImuSample s;
    s.t = t;
    s.gyro = {2.0 * std::sin(0.8 * t), 0.4 * std::cos(0.5 * t), 0.3};
    s.accel = {0.5 * std::sin(t), -0.4 * std::cos(0.7 * t),
               -9.8 + 0.1 * std::sin(1.3 * t)};
    return s;
  };
  const ins::NavState reference = run_stream(nav, input, 10.0, 10000.0);
  const ins::NavState at100 = run_stream(nav, input, 10.0, 100.0);
  const ins::NavState at200 = run_stream(nav, input, 10.0, 200.0);

  const double err100 =
      geo::ned_displacement(kEarth, reference.pos, at100.pos).norm();
  const double err200 =
      geo::ned_displacement(kEarth, reference.pos, at200.pos).norm();
  EXPECT_GT(err100 / err200, 2.0);
}
