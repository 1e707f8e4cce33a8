#include "hubnav/io/formats.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hubnav/geo/rotation.hpp"

namespace hubnav::io {

namespace {

constexpr std::size_t kMaxLineLength = 4096;  // adversarial-input cap

// Reads the next data line split into fields; returns false at EOF.
// Enforces the line-length cap and reports the 1-based line number.
class ColumnReader {
 public:
  ColumnReader(const std::string& path, std::size_t columns)
      : path_(path), columns_(columns), in_(path) {
    if (!in_) throw FormatError(path + ": cannot open");
  }

  bool next(std::vector<double>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.size() > kMaxLineLength) {
        throw FormatError(where() + ": line exceeds length cap");
      }
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      std::istringstream ss(line);
      fields.clear();
      double value;
      while (ss >> value) fields.push_back(value);
      std::string trailing;
      if (!ss.eof() && (ss.clear(), ss >> trailing)) {
        throw FormatError(where() + ": non-numeric field '" + trailing + "'");
      }
      if (fields.size() != columns_) {
        throw FormatError(where() + ": expected " + std::to_string(columns_) +
                          " columns, got " + std::to_string(fields.size()));
      }
      return true;
    }
    return false;
  }

  std::string where() const {
    return path_ + ":" + std::to_string(line_no_);
  }

 private:
  std::string path_;
  std::size_t columns_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

void check_monotonic(double prev, double cur, const std::string& where) {
  if (!(cur > prev)) {
    throw FormatError(where + ": timestamps not strictly increasing");
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError(path + ": cannot open for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw FormatError(path + ": write failed");
}

}  // namespace

std::vector<ins::ImuSample> parse_imu(const std::string& path) {
  ColumnReader reader(path, 7);
  std::vector<ins::ImuSample> out;
  std::vector<double> f;
  double prev_t = -std::numeric_limits<double>::infinity();
  while (reader.next(f)) {
    check_monotonic(prev_t, f[0], reader.where());
    prev_t = f[0];
    ins::ImuSample s;
    s.t = f[0];
    s.gyro = {f[1], f[2], f[3]};
    s.accel = {f[4], f[5], f[6]};
    out.push_back(s);
  }
  return out;
}

std::vector<wheel::GnssFix> parse_gnss(const std::string& path) {
  ColumnReader reader(path, 7);
  std::vector<wheel::GnssFix> out;
  std::vector<double> f;
  double prev_t = -std::numeric_limits<double>::infinity();
  while (reader.next(f)) {
    check_monotonic(prev_t, f[0], reader.where());
    prev_t = f[0];
    wheel::GnssFix fix;
    fix.t = f[0];
    fix.pos.lat = f[1] * geo::kDegToRad;
    fix.pos.lon = f[2] * geo::kDegToRad;
    fix.pos.height = f[3];
    fix.std = {f[4], f[5], f[6]};
    if ((fix.std.array() <= 0.0).any()) {
      throw FormatError(reader.where() + ": non-positive sigma");
    }
    out.push_back(fix);
  }
  return out;
}

std::vector<sim::TruthRecord> parse_trajectory(const std::string& path) {
  ColumnReader reader(path, 10);
  std::vector<sim::TruthRecord> out;
  std::vector<double> f;
  double prev_t = -std::numeric_limits<double>::infinity();
  while (reader.next(f)) {
    check_monotonic(prev_t, f[0], reader.where());
    prev_t = f[0];
    sim::TruthRecord r;
    r.t = f[0];
    r.pos.lat = f[1] * geo::kDegToRad;
    r.pos.lon = f[2] * geo::kDegToRad;
    r.pos.height = f[3];
    r.vel = {f[4], f[5], f[6]};
    r.att = geo::euler_to_rotation(
        {f[7] * geo::kDegToRad, f[8] * geo::kDegToRad, f[9] * geo::kDegToRad});
    // Derived conveniences, exact only for zero mounting angles: vehicle
    // heading from the body x-axis, wheel angle from the residual roll.
    const Eigen::Vector3d axis = r.att.col(0);
    r.vehicle_heading =
        geo::wrap_pi(std::atan2(axis.y(), axis.x()) - M_PI / 2.0);
    const Eigen::Matrix3d spin =
        geo::rotation_z(r.vehicle_heading + M_PI / 2.0).transpose() * r.att;
    r.wheel_angle = std::atan2(spin(2, 1), spin(1, 1));
    out.push_back(r);
  }
  return out;
}

std::vector<ParamLogRecord> parse_param_log(const std::string& path) {
  ColumnReader reader(path, 11);
  std::vector<ParamLogRecord> out;
  std::vector<double> f;
  double prev_t = -std::numeric_limits<double>::infinity();
  while (reader.next(f)) {
    check_monotonic(prev_t, f[0], reader.where());
    prev_t = f[0];
    ParamLogRecord r;
    r.t = f[0];
    r.leverarm = {f[1], f[2]};
    r.mounting = {f[3] * geo::kDegToRad, f[4] * geo::kDegToRad};
    r.radius_scale = f[5];
    r.leverarm_std = {f[6], f[7]};
    r.mounting_std = {f[8] * geo::kDegToRad, f[9] * geo::kDegToRad};
    r.radius_scale_std = f[10];
    if (r.leverarm_std.minCoeff() < 0.0 || r.mounting_std.minCoeff() < 0.0 ||
        r.radius_scale_std < 0.0) {
      throw FormatError(reader.where() + ": negative sigma");
    }
    out.push_back(r);
  }
  return out;
}

void write_imu(const std::string& path, const std::vector<ins::ImuSample>& v) {
  std::ofstream out = open_out(path);
  out << "# t[s] gx[rad/s] gy[rad/s] gz[rad/s] ax[m/s2] ay[m/s2] az[m/s2]\n";
  char buf[256];
  for (const ins::ImuSample& s : v) {
    std::snprintf(buf, sizeof(buf),
                  "%.6f %.9f %.9f %.9f %.9f %.9f %.9f\n", s.t, s.gyro.x(),
                  s.gyro.y(), s.gyro.z(), s.accel.x(), s.accel.y(),
                  s.accel.z());
    out << buf;
  }
  finish(out, path);
}

void write_gnss(const std::string& path, const std::vector<wheel::GnssFix>& v) {
  std::ofstream out = open_out(path);
  out << "# t[s] lat[deg] lon[deg] h[m] sigN[m] sigE[m] sigD[m]\n";
  char buf[256];
  for (const wheel::GnssFix& f : v) {
    std::snprintf(buf, sizeof(buf), "%.6f %.9f %.9f %.4f %.4f %.4f %.4f\n",
                  f.t, f.pos.lat * geo::kRadToDeg, f.pos.lon * geo::kRadToDeg,
                  f.pos.height, f.std.x(), f.std.y(), f.std.z());
    out << buf;
  }
  finish(out, path);
}

void write_trajectory(const std::string& path,
                      const std::vector<sim::TruthRecord>& v) {
  std::ofstream out = open_out(path);
  out << "# t[s] lat[deg] lon[deg] h[m] vN[m/s] vE[m/s] vD[m/s] "
         "roll[deg] pitch[deg] yaw[deg]\n";
  char buf[320];
  for (const sim::TruthRecord& r : v) {
    const geo::EulerResult e = geo::rotation_to_euler(r.att);
    std::snprintf(buf, sizeof(buf),
                  "%.6f %.9f %.9f %.4f %.4f %.4f %.4f %.9f %.9f %.9f\n", r.t,
                  r.pos.lat * geo::kRadToDeg, r.pos.lon * geo::kRadToDeg,
                  r.pos.height, r.vel.x(), r.vel.y(), r.vel.z(),
                  e.euler.roll * geo::kRadToDeg,
                  e.euler.pitch * geo::kRadToDeg,
                  e.euler.yaw * geo::kRadToDeg);
    out << buf;
  }
  finish(out, path);
}

void write_param_log(const std::string& path,
                     const std::vector<ParamLogRecord>& v) {
  std::ofstream out = open_out(path);
  out << "# t[s] ly[m] lz[m] pitch[deg] heading[deg] sr "
         "sig_ly[m] sig_lz[m] sig_pitch[deg] sig_heading[deg] sig_sr\n";
  char buf[320];
  for (const ParamLogRecord& r : v) {
    std::snprintf(buf, sizeof(buf),
                  "%.6f %.4f %.4f %.9f %.9f %.8f %.4f %.4f %.9f %.9f %.8f\n",
                  r.t, r.leverarm.x(), r.leverarm.y(),
                  r.mounting.x() * geo::kRadToDeg,
                  r.mounting.y() * geo::kRadToDeg, r.radius_scale,
                  r.leverarm_std.x(), r.leverarm_std.y(),
                  r.mounting_std.x() * geo::kRadToDeg,
                  r.mounting_std.y() * geo::kRadToDeg, r.radius_scale_std);
    out << buf;
  }
  finish(out, path);
}

void write_innovation_log(const std::string& path,
                          const std::vector<InnovationRecord>& v) {
  std::ofstream out = open_out(path);
  out << "# t[s] kind(0=vel,1=gnss,2=rate) dof chi2 gate accepted z0 z1 z2\n";
  char buf[320];
  for (const InnovationRecord& r : v) {
    std::snprintf(buf, sizeof(buf), "%.6f %d %d %.6f %.6f %d %.6e %.6e %.6e\n",
                  r.t, static_cast<int>(r.kind), r.dof, r.chi_square,
                  r.gate_threshold, r.accepted ? 1 : 0, r.z.x(), r.z.y(),
                  r.z.z());
    out << buf;
  }
  finish(out, path);
}

}  // namespace hubnav::io
