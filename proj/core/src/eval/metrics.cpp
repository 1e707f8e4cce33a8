#include "hubnav/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <stdexcept>

#include "hubnav/geo/rotation.hpp"

namespace hubnav::eval {

namespace {

double axis_heading(const Eigen::Matrix3d& att) {
  const Eigen::Vector3d axis = att.col(0);
  return std::atan2(axis.y(), axis.x());
}

sim::TruthRecord interpolate_truth(const geo::EarthModel& earth,
                                   const sim::TruthRecord& a,
                                   const sim::TruthRecord& b, double t) {
  const double span = b.t - a.t;
  const double tau = span > 0.0 ? std::clamp((t - a.t) / span, 0.0, 1.0) : 0.0;
  sim::TruthRecord out;
  out.t = t;
  out.pos = geo::offset_geodetic(
      earth, a.pos, tau * geo::ned_displacement(earth, a.pos, b.pos));
  out.vel = (1.0 - tau) * a.vel + tau * b.vel;
  out.att = a.att * geo::exp_so3(tau * geo::log_so3(a.att.transpose() * b.att));
  return out;
}

}  // namespace

std::vector<EpochError> per_epoch_errors(
    const geo::EarthModel& earth, const std::vector<sim::TruthRecord>& estimate,
    const std::vector<sim::TruthRecord>& truth) {
  if (estimate.empty() || truth.empty()) {
    throw std::invalid_argument("empty trajectory");
  }
  const double t_begin = std::max(estimate.front().t, truth.front().t);
  const double t_end = std::min(estimate.back().t, truth.back().t);
  if (!(t_begin <= t_end)) {
    throw std::invalid_argument("estimate and truth time ranges do not overlap");
  }

  std::vector<EpochError> out;
  out.reserve(estimate.size());
  std::size_t j = 0;
  for (const sim::TruthRecord& est : estimate) {
    if (est.t < t_begin - 1e-9 || est.t > t_end + 1e-9) continue;
    while (j + 1 < truth.size() && truth[j + 1].t < est.t) ++j;
    const sim::TruthRecord ref = interpolate_truth(
        earth, truth[j], truth[std::min(j + 1, truth.size() - 1)], est.t);
    EpochError e;
    e.t = est.t;
    const Eigen::Vector3d ned = geo::ned_displacement(earth, ref.pos, est.pos);
    e.north = ned.x();
    e.east = ned.y();
    e.down = ned.z();
    e.horizontal = std::hypot(ned.x(), ned.y());
    e.heading_deg =
        geo::wrap_pi(axis_heading(est.att) - axis_heading(ref.att)) *
        geo::kRadToDeg;
    out.push_back(e);
  }
  return out;
}

MetricsReport evaluate_trajectory(
    const geo::EarthModel& earth, const std::vector<sim::TruthRecord>& estimate,
    const std::vector<sim::TruthRecord>& truth,
    const std::vector<std::pair<double, double>>& windows) {
  const std::vector<EpochError> errors = per_epoch_errors(earth, estimate, truth);

  MetricsReport report;
  report.epochs = errors.size();
  double sum_h2 = 0.0, sum_d2 = 0.0, sum_psi2 = 0.0;
  for (const EpochError& e : errors) {
    sum_h2 += e.horizontal * e.horizontal;
    sum_d2 += e.down * e.down;
    sum_psi2 += e.heading_deg * e.heading_deg;
  }
  const double n = std::max<std::size_t>(errors.size(), 1);
  report.horizontal_rmse = std::sqrt(sum_h2 / n);
  report.height_rmse = std::sqrt(sum_d2 / n);
  report.heading_rmse_deg = std::sqrt(sum_psi2 / n);

  for (const auto& [start, end] : windows) {
    WindowStats w;
    w.start = start;
    w.end = end;
    double sum2 = 0.0;
    for (const EpochError& e : errors) {
      if (e.t < start || e.t >= end) continue;
      sum2 += e.horizontal * e.horizontal;
      w.max_error = std::max(w.max_error, e.horizontal);
      ++w.epochs;
    }
    w.rmse = w.epochs > 0 ? std::sqrt(sum2 / static_cast<double>(w.epochs)) : 0.0;
    report.windows.push_back(w);
  }
  return report;
}

void write_metrics(const std::string& path, const MetricsReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  char buf[256];
  std::snprintf(buf, sizeof(buf), "horizontal_rmse_m %.4f\n",
                report.horizontal_rmse);
  out << buf;
  std::snprintf(buf, sizeof(buf), "height_rmse_m %.4f\n", report.height_rmse);
  out << buf;
  std::snprintf(buf, sizeof(buf), "heading_rmse_deg %.9f\n",
                report.heading_rmse_deg);
  out << buf;
  out << "epochs " << report.epochs << "\n";
  for (const WindowStats& w : report.windows) {
    std::snprintf(buf, sizeof(buf),
                  "outage %.3f %.3f rmse_m %.4f max_m %.4f epochs %zu\n",
                  w.start, w.end, w.rmse, w.max_error, w.epochs);
    out << buf;
  }
  out.flush();
  if (!out) throw std::runtime_error(path + ": write failed");
}

void write_epoch_errors(const std::string& path,
                        const std::vector<EpochError>& errors) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "# t[s] north[m] east[m] down[m] horizontal[m] heading[deg]\n";
  char buf[256];
  for (const EpochError& e : errors) {
    std::snprintf(buf, sizeof(buf), "%.6f %.4f %.4f %.4f %.4f %.9f\n", e.t,
                  e.north, e.east, e.down, e.horizontal, e.heading_deg);
    out << buf;
  }
  out.flush();
  if (!out) throw std::runtime_error(path + ": write failed");
}

std::vector<ParamConvergence> assess_params(
    const std::vector<io::ParamLogRecord>& log, const ParamTruth& truth,
    const ConvergenceBands& bands) {
  struct Channel {
    std::string name;
    std::function<double(const io::ParamLogRecord&)> value;
    std::function<double(const io::ParamLogRecord&)> std;
    double target;
    double band;
  };
  const std::vector<Channel> channels = {
      {"leverarm_y", [](const auto& r) { return r.leverarm.x(); },
       [](const auto& r) { return r.leverarm_std.x(); }, truth.leverarm.x(),
       bands.leverarm},
      {"leverarm_z", [](const auto& r) { return r.leverarm.y(); },
       [](const auto& r) { return r.leverarm_std.y(); }, truth.leverarm.y(),
       bands.leverarm},
      {"mounting_pitch", [](const auto& r) { return r.mounting.x(); },
       [](const auto& r) { return r.mounting_std.x(); }, truth.mounting.x(),
       bands.mounting},
      {"mounting_heading", [](const auto& r) { return r.mounting.y(); },
       [](const auto& r) { return r.mounting_std.y(); }, truth.mounting.y(),
       bands.mounting},
      {"radius_scale", [](const auto& r) { return r.radius_scale; },
       [](const auto& r) { return r.radius_scale_std; }, truth.radius_scale,
       bands.radius_scale},
  };

  std::vector<ParamConvergence> out;
  for (const Channel& ch : channels) {
    ParamConvergence pc;
    pc.name = ch.name;
    if (log.empty()) {
      out.push_back(pc);
      continue;
    }
    pc.final_error = ch.value(log.back()) - ch.target;
    pc.final_std = ch.std(log.back());

    const double t0 = log.front().t;
    std::optional<double> in_band_since;
    for (const io::ParamLogRecord& r : log) {
      const bool inside = std::abs(ch.value(r) - ch.target) <= ch.band;
      if (inside) {
        if (!in_band_since) in_band_since = r.t;
        if (r.t - *in_band_since >= bands.hold) {
          pc.converged = true;
          pc.time = *in_band_since - t0;
          break;
        }
      } else {
        in_band_since.reset();
      }
    }
    out.push_back(pc);
  }
  return out;
}

}  // namespace hubnav::eval
