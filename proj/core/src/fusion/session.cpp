#include "hubnav/fusion/session.hpp"

#include <cmath>

#include "hubnav/geo/rotation.hpp"
#include "hubnav/wheel/models.hpp"

namespace hubnav::fusion {

namespace {
constexpr double kLogInterval = 0.1;   // s
constexpr double kEpochTol = 1e-6;     // s
constexpr double kStaleFix = 0.2;      // s
constexpr double kDivergencePosVar = 1e12;  // m^2, trace bound
// After this many consecutive gate rejections of one measurement kind the
// next update is applied anyway with its noise inflated to the gate edge.
// A hard gate would otherwise lock out the corrections that shrink the very
// transient that trips it (e.g. the attitude excursion right after motion
// starts, when a large residual spin-axis scale error integrates quickly).
constexpr int kMaxConsecutiveRejects = 3;
}  // namespace

eskf::FullState initial_state_from_config(const io::RunConfig& config) {
  eskf::FullState full;
  full.nav.pos = config.initial_pos;
  full.nav.vel = config.initial_vel;
  const double psi_w = config.initial_heading + M_PI / 2.0;
  full.nav.att = geo::rotation_z(psi_w) *
                 wheel::body_to_wheel_rotation(config.install.mounting);
  full.install = config.install;
  return full;
}

eskf::Covariance initial_covariance(const io::RunConfig& config) {
  using namespace eskf::idx;
  const io::InitialStd& s = config.initial_std;
  eskf::ErrorState d;
  d.segment<3>(kPos).setConstant(s.position);
  d.segment<3>(kVel).setConstant(s.velocity);
  d.segment<3>(kAtt) = Eigen::Vector3d(s.attitude_horizontal,
                                       s.attitude_horizontal,
                                       s.attitude_heading);
  d.segment<3>(kGyroBias).setConstant(s.gyro_bias);
  d.segment<3>(kAccelBias).setConstant(s.accel_bias);
  d.segment<3>(kGyroScale).setConstant(s.gyro_scale);
  d.segment<3>(kAccelScale).setConstant(s.accel_scale);
  d.segment<2>(kLeverArm).setConstant(config.estimate_leverarm ? s.leverarm
                                                               : 0.0);
  d.segment<2>(kMounting).setConstant(config.estimate_mounting ? s.mounting
                                                               : 0.0);
  d(kRadiusScale) = config.estimate_radius_scale ? s.radius_scale : 0.0;
  eskf::Covariance cov = d.cwiseProduct(d).asDiagonal();

  if (config.estimate_mounting) {
    // The initial body attitude is built from the mounting estimate, so the
    // attitude error starts correlated with the mounting error: with zero
    // wheel roll, phi(0) = Rz(psi_w) (0, x_pitch, x_heading).
    const double psi_w = config.initial_heading + M_PI / 2.0;
    const Eigen::Matrix<double, 3, 2> j =
        geo::rotation_z(psi_w).block<3, 2>(0, 1);
    const Eigen::Matrix2d pm =
        s.mounting * s.mounting * Eigen::Matrix2d::Identity();
    cov.block<3, 3>(kAtt, kAtt) += j * pm * j.transpose();
    cov.block<3, 2>(kAtt, kMounting) = j * pm;
    cov.block<2, 3>(kMounting, kAtt) = (j * pm).transpose();
  }
  return cov;
}

FusionSession::FusionSession(const geo::EarthModel& earth,
                             const io::RunConfig& config,
                             const eskf::FullState& initial,
                             const Disable& disable)
    : earth_(earth),
      config_(config),
      disable_(disable),
      noise_(config.process_noise),
      state_(initial),
      gate_(config.turn_gate),
      fixer_(config.fixer) {
  cov_ = initial_covariance(config);
  if (!config_.estimate_leverarm) noise_.leverarm_rw = 0.0;
  if (!config_.estimate_mounting) noise_.mounting_rw = 0.0;
  if (!config_.estimate_radius_scale) noise_.radius_scale_rw = 0.0;
}

void FusionSession::process_imu(const ins::ImuSample& raw) {
  const ins::ImuSample comp = ins::compensate(raw, state_.imu_errors);
  last_gyro_ = comp.gyro;

  const Eigen::Matrix3d r_b_w =
      wheel::body_to_wheel_rotation(state_.install.mounting);
  gate_.add_sample(raw.t, (r_b_w * comp.gyro).tail<2>());

  if (!started_) {
    started_ = true;
    start_time_ = raw.t;
    state_.nav.t = raw.t;
    prev_comp_ = comp;
    nav_prev_ = state_.nav;
    log_epoch();
    return;
  }

  nav_prev_ = state_.nav;
  const double dt = comp.t - prev_comp_.t;
  state_.nav = prev2_comp_
                   ? ins::propagate(earth_, state_.nav, *prev2_comp_,
                                    prev_comp_, comp)
                   : ins::propagate(earth_, state_.nav, prev_comp_, comp);

  const eskf::StateMatrix f =
      eskf::build_error_dynamics(earth_, nav_prev_, comp, noise_);
  const eskf::DiscreteModel model =
      eskf::discretize(f, noise_, nav_prev_, comp, dt);
  cov_ = eskf::predict(cov_, model.phi, model.qd);
  prev2_comp_ = prev_comp_;
  prev_comp_ = comp;

  gyro_sum_ += comp.gyro;
  ++gyro_count_;
  const double vel_dt = 1.0 / config_.velocity_update_hz;
  const double next_vel_t = start_time_ + static_cast<double>(vel_epoch_) * vel_dt;
  if (!window_mid_ && state_.nav.t >= next_vel_t - 0.5 * vel_dt - kEpochTol) {
    window_mid_ = state_.nav;
  }
  if (state_.nav.t >= next_vel_t - kEpochTol) {
    run_velocity_epoch();
    ++vel_epoch_;
    gyro_sum_.setZero();
    gyro_count_ = 0;
    window_mid_.reset();
  }

  check_health();

  const double next_log_t =
      start_time_ + static_cast<double>(log_epoch_index_) * kLogInterval;
  if (state_.nav.t >= next_log_t - kEpochTol) {
    log_epoch();
  }
}

void FusionSession::run_velocity_epoch() {
  if (gyro_count_ == 0) return;
  const Eigen::Vector3d omega = gyro_sum_ / static_cast<double>(gyro_count_);
  const ins::NavState& nav_lin = window_mid_ ? *window_mid_ : state_.nav;

  if (!disable_.velocity) {
    wheel::VelocityNoise noise = config_.velocity_noise;
    // The observed wheel speed is built from the gyro, so fold the gyro noise
    // at the update cadence into the forward sigma.
    const double gyro_sigma = config_.process_noise.angle_random_walk *
                              std::sqrt(config_.velocity_update_hz);
    const double wheel_sigma =
        state_.install.effective_radius() * gyro_sigma;
    noise.sigma_forward = std::hypot(noise.sigma_forward, wheel_sigma);
    const wheel::BlockResult res =
        wheel::build_velocity_block(nav_lin, omega, state_.install, noise);
    if (res.valid) apply_update(res.block);
  }

  fixer_.observe(state_.nav.t,
                 std::sqrt(cov_(eskf::idx::kMounting, eskf::idx::kMounting)),
                 std::sqrt(cov_(eskf::idx::kMounting + 1,
                                eskf::idx::kMounting + 1)));
  if (fixer_.is_fixed()) noise_.mounting_rw = 0.0;

  if (config_.wheel_rate_constraint && !disable_.wheel_rate &&
      !fixer_.is_fixed() && gate_.is_open()) {
    apply_update(wheel::build_wheel_rate_block(omega, state_.install,
                                               config_.sigma_wheel_rate));
  }
}

void FusionSession::process_gnss(const wheel::GnssFix& fix) {
  if (disable_.gnss || !started_) return;
  for (const auto& [begin, end] : config_.outage_windows) {
    if (fix.t >= begin && fix.t < end) {
      ++withheld_fixes_;
      return;
    }
  }
  if (fix.t < nav_prev_.t - kStaleFix) {
    ++stale_fixes_;
    return;
  }

  // Interpolate the navigation state to the fix epoch.
  ins::NavState nav_fix = state_.nav;
  const double span = state_.nav.t - nav_prev_.t;
  if (span > 0.0 && fix.t < state_.nav.t) {
    const double tau =
        std::clamp((fix.t - nav_prev_.t) / span, 0.0, 1.0);
    nav_fix.t = fix.t;
    nav_fix.pos = geo::offset_geodetic(
        earth_, nav_prev_.pos,
        tau * geo::ned_displacement(earth_, nav_prev_.pos, state_.nav.pos));
    nav_fix.vel = (1.0 - tau) * nav_prev_.vel + tau * state_.nav.vel;
    nav_fix.att =
        nav_prev_.att *
        geo::exp_so3(tau * geo::log_so3(nav_prev_.att.transpose() *
                                        state_.nav.att));
  }

  wheel::GnssFix used = fix;
  if (config_.gnss_std_override > 0.0) {
    used.std.setConstant(config_.gnss_std_override);
  }
  const wheel::BlockResult res =
      wheel::build_gnss_block(earth_, nav_fix, state_.install, used);
  if (res.valid) apply_update(res.block);
  check_health();
}

void FusionSession::apply_update(const wheel::MeasurementBlock& block) {
  const int kind = static_cast<int>(block.kind);
  eskf::UpdateResult res =
      eskf::kalman_update(cov_, error_, block.h, block.z, block.r,
                          config_.chi_square_confidence,
                          config_.chi_square_enabled);
  if (!res.accepted && consecutive_rejects_[kind] >= kMaxConsecutiveRejects) {
    // Soft-gate escape: apply with the noise inflated to the gate edge so a
    // sustained transient cannot lock out its own correction.
    const double inflation =
        std::max(res.chi_square / std::max(res.gate_threshold, 1e-12), 1.0);
    res = eskf::kalman_update(cov_, error_, block.h, block.z,
                              inflation * block.r,
                              config_.chi_square_confidence, false);
  }
  io::InnovationRecord rec;
  rec.t = state_.nav.t;
  rec.kind = block.kind;
  rec.dof = static_cast<int>(block.z.size());
  rec.chi_square = res.chi_square;
  rec.gate_threshold = res.gate_threshold;
  rec.accepted = res.accepted;
  rec.z.head(block.z.size()) = block.z;
  innovation_log_.push_back(rec);

  if (!res.accepted) {
    ++consecutive_rejects_[kind];
    return;
  }
  consecutive_rejects_[kind] = 0;
  cov_ = res.cov;
  error_ = res.state;
  state_ = eskf::feedback(earth_, state_, error_);
}

void FusionSession::check_health() const {
  const double pos_var = cov_.block<3, 3>(0, 0).trace();
  if (!std::isfinite(pos_var) || pos_var > kDivergencePosVar) {
    throw FilterDivergence("filter diverged: position variance " +
                           std::to_string(pos_var));
  }
}

sim::TruthRecord FusionSession::wheel_center_record() const {
  sim::TruthRecord rec;
  rec.t = state_.nav.t;
  const Eigen::Vector3d lever3 = state_.install.leverarm3();
  rec.pos = geo::offset_geodetic(earth_, state_.nav.pos,
                                 state_.nav.att * lever3);
  rec.vel = state_.nav.vel + state_.nav.att * last_gyro_.cross(lever3);
  rec.att = state_.nav.att;
  const wheel::VehicleRotation vr =
      wheel::derive_vehicle_rotation(state_.nav.att, state_.install.mounting);
  rec.vehicle_heading = vr.heading;
  const Eigen::Matrix3d spin =
      geo::rotation_z(vr.heading + M_PI / 2.0).transpose() * state_.nav.att *
      wheel::body_to_wheel_rotation(state_.install.mounting).transpose();
  rec.wheel_angle = std::atan2(spin(2, 1), spin(1, 1));
  return rec;
}

void FusionSession::log_epoch() {
  ++log_epoch_index_;
  nav_log_.push_back(wheel_center_record());

  io::ParamLogRecord p;
  using namespace eskf::idx;
  p.t = state_.nav.t;
  p.leverarm = state_.install.leverarm;
  p.mounting = state_.install.mounting;
  p.radius_scale = state_.install.radius_scale;
  p.leverarm_std = {std::sqrt(cov_(kLeverArm, kLeverArm)),
                    std::sqrt(cov_(kLeverArm + 1, kLeverArm + 1))};
  p.mounting_std = {std::sqrt(cov_(kMounting, kMounting)),
                    std::sqrt(cov_(kMounting + 1, kMounting + 1))};
  p.radius_scale_std = std::sqrt(cov_(kRadiusScale, kRadiusScale));
  param_log_.push_back(p);

  if (on_log) on_log(*this);
}

FusionResult run_fusion(
    const geo::EarthModel& earth, const io::RunConfig& config,
    const eskf::FullState& initial, const std::vector<ins::ImuSample>& imu,
    const std::vector<wheel::GnssFix>& gnss,
    const FusionSession::Disable& disable,
    const std::function<void(const FusionSession&)>& on_log) {
  FusionSession session(earth, config, initial, disable);
  session.on_log = on_log;
  std::size_t g = 0;
  for (const ins::ImuSample& sample : imu) {
    session.process_imu(sample);
    while (g < gnss.size() && gnss[g].t <= sample.t + 1e-9) {
      session.process_gnss(gnss[g]);
      ++g;
    }
  }
  FusionResult out;
  out.nav = session.nav_log();
  out.params = session.param_log();
  out.innovations = session.innovation_log();
  out.final_state = session.state();
  out.final_cov = session.covariance();
  return out;
}

}  // namespace hubnav::fusion
