#include "hubnav/io/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace hubnav::io {

namespace {

constexpr std::size_t kMaxLineLength = 4096;

double to_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
  if (used != value.size()) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const std::uint64_t out = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an unsigned integer, got '" + value +
                      "'");
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  std::string v = value;
  std::transform(v.begin(), v.end(), v.begin(), ::tolower);
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError(key + ": expected a boolean, got '" + value + "'");
}

double dph_to_rps(double deg_per_hour) {
  return deg_per_hour * geo::kDegToRad / 3600.0;
}

double deg_sqrt_h_to_si(double v) { return v * geo::kDegToRad / 60.0; }

sim::Segment parse_segment(const std::string& key, const std::string& value) {
  std::istringstream ss(value);
  std::string type;
  ss >> type;
  if (type == "straight") {
    double length, speed;
    if (ss >> length >> speed) return sim::Segment::straight(length, speed);
  } else if (type == "arc") {
    double radius, sweep_deg, speed;
    if (ss >> radius >> sweep_deg >> speed) {
      return sim::Segment::arc(radius, sweep_deg * geo::kDegToRad, speed);
    }
  } else if (type == "dwell") {
    double duration;
    if (ss >> duration) return sim::Segment::dwell(duration);
  }
  throw ConfigError(key + ": expected 'straight <m> <m/s>', "
                          "'arc <m> <deg> <m/s>' or 'dwell <s>', got '" +
                    value + "'");
}

}  // namespace

std::vector<std::pair<double, double>> parse_outage_list(const std::string& s) {
  std::vector<std::pair<double, double>> out;
  if (s.empty()) return out;
  std::istringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("outage window '" + item + "': expected start:end");
    }
    const double start = to_double("outages", item.substr(0, colon));
    const double end = to_double("outages", item.substr(colon + 1));
    if (!(end > start) || start < 0.0) {
      throw ConfigError("outage window '" + item + "': end must follow start");
    }
    out.emplace_back(start, end);
  }
  return out;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");

  RunConfig cfg;

  using Handler = std::function<void(const std::string&, const std::string&)>;
  std::map<std::string, Handler> schema;
  auto str = [](std::string& dst) {
    return [&dst](const std::string&, const std::string& v) { dst = v; };
  };
  auto num = [](double& dst) {
    return [&dst](const std::string& k, const std::string& v) {
      dst = to_double(k, v);
    };
  };
  auto num_deg = [](double& dst) {
    return [&dst](const std::string& k, const std::string& v) {
      dst = to_double(k, v) * geo::kDegToRad;
    };
  };
  auto num_dph = [](double& dst) {
    return [&dst](const std::string& k, const std::string& v) {
      dst = dph_to_rps(to_double(k, v));
    };
  };
  auto num_dsh = [](double& dst) {  // deg/sqrt(h)
    return [&dst](const std::string& k, const std::string& v) {
      dst = deg_sqrt_h_to_si(to_double(k, v));
    };
  };
  auto num_msh = [](double& dst) {  // m/s/sqrt(h)
    return [&dst](const std::string& k, const std::string& v) {
      dst = to_double(k, v) / 60.0;
    };
  };
  auto boolean = [](bool& dst) {
    return [&dst](const std::string& k, const std::string& v) {
      dst = to_bool(k, v);
    };
  };

  schema["paths.imu"] = str(cfg.imu_path);
  schema["paths.gnss"] = str(cfg.gnss_path);
  schema["paths.truth"] = str(cfg.truth_path);
  schema["paths.output_dir"] = str(cfg.output_dir);

  schema["initial.latitude_deg"] = [&](const std::string& k,
                                       const std::string& v) {
    cfg.initial_pos.lat = to_double(k, v) * geo::kDegToRad;
    cfg.has_initial_pos = true;
  };
  schema["initial.longitude_deg"] = num_deg(cfg.initial_pos.lon);
  schema["initial.height_m"] = num(cfg.initial_pos.height);
  schema["initial.heading_deg"] = num_deg(cfg.initial_heading);
  schema["initial.velocity_north"] = num(cfg.initial_vel.x());
  schema["initial.velocity_east"] = num(cfg.initial_vel.y());
  schema["initial.velocity_down"] = num(cfg.initial_vel.z());

  schema["initial_std.position_m"] = num(cfg.initial_std.position);
  schema["initial_std.velocity_mps"] = num(cfg.initial_std.velocity);
  schema["initial_std.attitude_horizontal_deg"] =
      num_deg(cfg.initial_std.attitude_horizontal);
  schema["initial_std.attitude_heading_deg"] =
      num_deg(cfg.initial_std.attitude_heading);
  schema["initial_std.gyro_bias_dph"] = num_dph(cfg.initial_std.gyro_bias);
  schema["initial_std.accel_bias_mps2"] = num(cfg.initial_std.accel_bias);
  schema["initial_std.gyro_scale"] = num(cfg.initial_std.gyro_scale);
  schema["initial_std.accel_scale"] = num(cfg.initial_std.accel_scale);
  schema["initial_std.leverarm_m"] = num(cfg.initial_std.leverarm);
  schema["initial_std.mounting_deg"] = num_deg(cfg.initial_std.mounting);
  schema["initial_std.radius_scale"] = num(cfg.initial_std.radius_scale);

  schema["process_noise.arw_deg_sqrt_h"] =
      num_dsh(cfg.process_noise.angle_random_walk);
  schema["process_noise.vrw_mps_sqrt_h"] =
      num_msh(cfg.process_noise.velocity_random_walk);
  schema["process_noise.gyro_bias_std_dph"] =
      num_dph(cfg.process_noise.gyro_bias_std);
  schema["process_noise.gyro_bias_tau_s"] = num(cfg.process_noise.gyro_bias_tau);
  schema["process_noise.accel_bias_std_mps2"] =
      num(cfg.process_noise.accel_bias_std);
  schema["process_noise.accel_bias_tau_s"] =
      num(cfg.process_noise.accel_bias_tau);
  schema["process_noise.gyro_scale_std"] = num(cfg.process_noise.gyro_scale_std);
  schema["process_noise.gyro_scale_tau_s"] =
      num(cfg.process_noise.gyro_scale_tau);
  schema["process_noise.accel_scale_std"] =
      num(cfg.process_noise.accel_scale_std);
  schema["process_noise.accel_scale_tau_s"] =
      num(cfg.process_noise.accel_scale_tau);
  schema["process_noise.leverarm_rw"] = num(cfg.process_noise.leverarm_rw);
  schema["process_noise.mounting_rw"] = num(cfg.process_noise.mounting_rw);
  schema["process_noise.radius_scale_rw"] =
      num(cfg.process_noise.radius_scale_rw);

  schema["installation.wheel_radius_m"] = [&](const std::string& k,
                                              const std::string& v) {
    cfg.install.measured_radius = to_double(k, v);
    cfg.has_wheel_radius = true;
  };
  schema["installation.leverarm_y_m"] = num(cfg.install.leverarm.x());
  schema["installation.leverarm_z_m"] = num(cfg.install.leverarm.y());
  schema["installation.mounting_pitch_deg"] = num_deg(cfg.install.mounting.x());
  schema["installation.mounting_heading_deg"] =
      num_deg(cfg.install.mounting.y());
  schema["installation.radius_scale"] = num(cfg.install.radius_scale);
  schema["installation.antenna_x_m"] = num(cfg.install.antenna_lever_v.x());
  schema["installation.antenna_y_m"] = num(cfg.install.antenna_lever_v.y());
  schema["installation.antenna_z_m"] = num(cfg.install.antenna_lever_v.z());

  schema["measurement.sigma_forward_mps"] =
      num(cfg.velocity_noise.sigma_forward);
  schema["measurement.sigma_lateral_mps"] =
      num(cfg.velocity_noise.sigma_lateral);
  schema["measurement.sigma_vertical_mps"] =
      num(cfg.velocity_noise.sigma_vertical);
  schema["measurement.sigma_wheel_rate_rps"] = num(cfg.sigma_wheel_rate);
  schema["measurement.gnss_std_m"] = num(cfg.gnss_std_override);

  schema["rates.velocity_update_hz"] = num(cfg.velocity_update_hz);
  schema["rates.gnss_rate_hz"] = num(cfg.gnss_rate_hz);

  schema["outages.windows"] = [&](const std::string&, const std::string& v) {
    cfg.outage_windows = parse_outage_list(v);
  };

  schema["gates.chi_square_confidence"] = num(cfg.chi_square_confidence);
  schema["gates.chi_square_enabled"] = boolean(cfg.chi_square_enabled);
  schema["gates.turn_threshold_dps"] = [&](const std::string& k,
                                           const std::string& v) {
    cfg.turn_gate.threshold = to_double(k, v) * geo::kDegToRad;
  };
  schema["gates.turn_window_s"] = num(cfg.turn_gate.window);
  schema["gates.fix_std_threshold_deg"] = [&](const std::string& k,
                                              const std::string& v) {
    cfg.fixer.std_threshold = to_double(k, v) * geo::kDegToRad;
  };
  schema["gates.fix_hold_s"] = num(cfg.fixer.hold_time);

  schema["features.estimate_leverarm"] = boolean(cfg.estimate_leverarm);
  schema["features.estimate_mounting"] = boolean(cfg.estimate_mounting);
  schema["features.estimate_radius_scale"] = boolean(cfg.estimate_radius_scale);
  schema["features.wheel_rate_constraint"] = boolean(cfg.wheel_rate_constraint);

  schema["simulation.seed"] = [&](const std::string& k, const std::string& v) {
    cfg.sim.seed = to_u64(k, v);
  };
  schema["simulation.imu_rate_hz"] = num(cfg.sim.imu_rate_hz);
  schema["simulation.gnss_rate_hz"] = num(cfg.sim.gnss_rate_hz);
  schema["simulation.gnss_std_m"] = num(cfg.sim.gnss_std_m);
  schema["simulation.dt_internal_s"] = num(cfg.sim.dt_internal);
  schema["simulation.include_earth_rotation"] =
      boolean(cfg.sim.include_earth_rotation);
  schema["simulation.origin_latitude_deg"] =
      num_deg(cfg.sim.trajectory.origin.lat);
  schema["simulation.origin_longitude_deg"] =
      num_deg(cfg.sim.trajectory.origin.lon);
  schema["simulation.origin_height_m"] = num(cfg.sim.trajectory.origin.height);
  schema["simulation.initial_heading_deg"] =
      num_deg(cfg.sim.trajectory.initial_heading);
  schema["simulation.wheel_radius_m"] = num(cfg.sim.wheel_radius_true);
  schema["simulation.leverarm_y_m"] = num(cfg.sim.leverarm_true.x());
  schema["simulation.leverarm_z_m"] = num(cfg.sim.leverarm_true.y());
  schema["simulation.mounting_pitch_deg"] = num_deg(cfg.sim.mounting_true.x());
  schema["simulation.mounting_heading_deg"] =
      num_deg(cfg.sim.mounting_true.y());
  schema["simulation.radius_scale"] = num(cfg.sim.radius_scale_true);
  schema["simulation.antenna_x_m"] = num(cfg.sim.antenna_lever_v.x());
  schema["simulation.antenna_y_m"] = num(cfg.sim.antenna_lever_v.y());
  schema["simulation.antenna_z_m"] = num(cfg.sim.antenna_lever_v.z());
  schema["simulation.gyro_bias_std_dph"] = num_dph(cfg.sim.gyro_bias_std);
  schema["simulation.accel_bias_std_mps2"] = num(cfg.sim.accel_bias_std);
  schema["simulation.gyro_scale_std"] = num(cfg.sim.gyro_scale_std);
  schema["simulation.accel_scale_std"] = num(cfg.sim.accel_scale_std);
  schema["simulation.arw_deg_sqrt_h"] = num_dsh(cfg.sim.angle_random_walk);
  schema["simulation.vrw_mps_sqrt_h"] = num_msh(cfg.sim.velocity_random_walk);
  schema["simulation.windows"] = [&](const std::string&, const std::string& v) {
    cfg.sim.outage_windows = parse_outage_list(v);
  };

  schema["trajectory.accel_limit_mps2"] =
      num(cfg.sim.trajectory.accel_limit);
  schema["trajectory.segment"] = [&](const std::string& k,
                                     const std::string& v) {
    cfg.sim.trajectory.segments.push_back(parse_segment(k, v));
    cfg.has_trajectory = true;
  };

  std::set<std::string> seen;
  std::string section;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.size() > kMaxLineLength) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": line exceeds length cap");
    }
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r");
    line = line.substr(begin, end - begin + 1);

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(path + ":" + std::to_string(line_no) +
                          ": malformed section header");
      }
      section = line.substr(1, line.size() - 2);
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected key = value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    const auto handler = schema.find(key);
    if (handler == schema.end()) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
    }
    if (key != "trajectory.segment" && !seen.insert(key).second) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": duplicate key '" + key + "'");
    }
    handler->second(key, value);
  }

  if (!cfg.has_wheel_radius) {
    throw ConfigError(path + ": missing required key installation.wheel_radius_m");
  }
  if (cfg.sigma_wheel_rate <= 0.0) {
    // ARW-equivalent sigma for rates averaged over the update interval.
    cfg.sigma_wheel_rate = cfg.process_noise.angle_random_walk *
                           std::sqrt(cfg.velocity_update_hz);
  }
  return cfg;
}

}  // namespace hubnav::io
