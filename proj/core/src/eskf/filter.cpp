#include "hubnav/eskf/filter.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "hubnav/geo/rotation.hpp"

namespace hubnav::eskf {

Covariance predict(const Covariance& cov, const StateMatrix& phi,
                   const StateMatrix& qd) {
  Covariance out = phi * cov * phi.transpose() + qd;
  return 0.5 * (out + out.transpose());
}

namespace {

// Inverse standard normal CDF (Acklam's rational approximation, ~1e-9).
double normal_quantile(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double q, r;
  if (p < p_low) {
    q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
           q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

// Regularized lower incomplete gamma P(a, x) by series (x < a+1) or
// continued fraction, good to ~1e-12.
double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  const double log_gamma_a = std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma_a);
  }
  // Lentz continued fraction for Q(a, x).
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  const double q = std::exp(-x + a * std::log(x) - log_gamma_a) * h;
  return 1.0 - q;
}

}  // namespace

double chi_square_quantile(double probability, int dof) {
  // Wilson-Hilferty start, Newton refinement on the exact CDF.
  const double z = normal_quantile(probability);
  const double k = static_cast<double>(dof);
  const double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
  double x = std::max(k * t * t * t, 1e-8);
  const double a = 0.5 * k;
  for (int i = 0; i < 20; ++i) {
    const double f = gamma_p(a, 0.5 * x) - probability;
    const double pdf = 0.5 * std::exp((a - 1.0) * std::log(0.5 * x) - 0.5 * x -
                                      std::lgamma(a));
    if (pdf <= 0.0) break;
    const double step = f / pdf;
    x -= step;
    if (x <= 0.0) x = 1e-8;
    if (std::abs(step) < 1e-10 * (1.0 + x)) break;
  }
  return x;
}

UpdateResult kalman_update(const Covariance& cov, const ErrorState& state,
                           const Eigen::MatrixXd& h, const Eigen::VectorXd& z,
                           const Eigen::MatrixXd& r, double gate_confidence,
                           bool gate_enabled) {
  const int dim = static_cast<int>(z.size());
  UpdateResult out;
  out.state = state;
  out.cov = cov;

  const Eigen::MatrixXd s = h * cov * h.transpose() + r;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(s);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw std::runtime_error("innovation covariance not invertible");
  }

  const Eigen::VectorXd residual = z - h * state;
  out.chi_square = residual.dot(ldlt.solve(residual));
  out.gate_threshold = chi_square_quantile(gate_confidence, dim);
  if (gate_enabled && out.chi_square > out.gate_threshold) {
    out.accepted = false;
    return out;
  }

  const Eigen::MatrixXd gain = ldlt.solve(h * cov).transpose();
  out.state = state + gain * residual;
  const StateMatrix ikh = StateMatrix::Identity() - gain * h;
  Covariance p_new =
      ikh * cov * ikh.transpose() + gain * r * gain.transpose();
  out.cov = 0.5 * (p_new + p_new.transpose());
  return out;
}

FullState feedback(const geo::EarthModel& earth, const FullState& full,
                   ErrorState& state) {
  using namespace idx;
  FullState out = full;

  // Position, velocity, attitude, leverarm carry estimated-minus-true
  // errors; the residual sensor errors, mounting angles and radius scale
  // carry true-minus-estimated corrections.
  out.nav.pos =
      geo::offset_geodetic(earth, full.nav.pos, -state.segment<3>(kPos));
  out.nav.vel -= state.segment<3>(kVel);
  out.nav.att =
      geo::orthonormalize(geo::exp_so3(state.segment<3>(kAtt)) * full.nav.att);

  out.imu_errors.gyro_bias += state.segment<3>(kGyroBias);
  out.imu_errors.accel_bias += state.segment<3>(kAccelBias);
  out.imu_errors.gyro_scale += state.segment<3>(kGyroScale);
  out.imu_errors.accel_scale += state.segment<3>(kAccelScale);

  out.install.leverarm -= state.segment<2>(kLeverArm);
  out.install.mounting += state.segment<2>(kMounting);
  out.install.radius_scale += state(kRadiusScale);

  state.setZero();
  return out;
}

}  // namespace hubnav::eskf
