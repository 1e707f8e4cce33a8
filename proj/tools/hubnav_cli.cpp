// Command-line front end: simulate, fuse, evaluate, report-params,
// montecarlo. Exit codes: 0 success, 1 usage/config error, 2 data error,
// 3 filter divergence, 4 no convergence.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hubnav/eval/metrics.hpp"
#include "hubnav/fusion/montecarlo.hpp"
#include "hubnav/fusion/session.hpp"
#include "hubnav/geo/earth.hpp"
#include "hubnav/io/config.hpp"
#include "hubnav/io/formats.hpp"
#include "hubnav/sim/simulator.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitNoConvergence = 4;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string outages;
  std::vector<std::string> disable;
};

hubnav::io::RunConfig load_config(const CommonArgs& args) {
  hubnav::io::RunConfig cfg = hubnav::io::parse_config(args.config_path);
  if (args.seed_set) cfg.sim.seed = args.seed;
  if (!args.outages.empty()) {
    cfg.outage_windows = hubnav::io::parse_outage_list(args.outages);
  }
  if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
  std::filesystem::create_directories(cfg.output_dir);
  return cfg;
}

hubnav::fusion::FusionSession::Disable parse_disable(
    const std::vector<std::string>& flags) {
  hubnav::fusion::FusionSession::Disable d;
  for (const std::string& f : flags) {
    if (f == "velocity") {
      d.velocity = true;
    } else if (f == "gnss") {
      d.gnss = true;
    } else if (f == "wheel-rate") {
      d.wheel_rate = true;
    } else {
      throw CLI::ValidationError("--disable",
                                 "expected velocity|gnss|wheel-rate");
    }
  }
  return d;
}

std::string joined(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

int cmd_simulate(const CommonArgs& args) {
  const hubnav::io::RunConfig cfg = load_config(args);
  if (!cfg.has_trajectory) {
    std::cerr << "simulate: config has no [trajectory] segments\n";
    return kExitUsage;
  }
  const hubnav::geo::EarthModel earth;
  hubnav::sim::Simulator sim(earth, cfg.sim);

  const std::string imu_path = joined(cfg.output_dir, "imu.txt");
  const std::string gnss_path = joined(cfg.output_dir, "gnss.txt");
  const std::string truth_path = joined(cfg.output_dir, "truth.txt");
  hubnav::io::write_imu(imu_path, sim.synthesize_imu());
  hubnav::io::write_gnss(gnss_path, sim.synthesize_gnss());
  hubnav::io::write_trajectory(truth_path,
                               sim.truth(1.0 / cfg.sim.imu_rate_hz));

  const double duration = sim.model().duration();
  const double distance = sim.model().total_distance();
  std::printf("scenario: duration %.1f s, distance %.1f m, mean speed %.2f m/s\n",
              duration, distance, distance / std::max(duration, 1e-9));
  std::printf("measured wheel radius handed to the filter: %.6f m\n",
              sim.measured_radius());
  std::printf("wrote %s, %s, %s\n", imu_path.c_str(), gnss_path.c_str(),
              truth_path.c_str());
  return kExitOk;
}

int cmd_fuse(const CommonArgs& args) {
  const hubnav::io::RunConfig cfg = load_config(args);
  if (cfg.imu_path.empty() || cfg.gnss_path.empty()) {
    std::cerr << "fuse: paths.imu and paths.gnss are required\n";
    return kExitUsage;
  }
  if (!cfg.has_initial_pos) {
    std::cerr << "fuse: [initial] position is required\n";
    return kExitUsage;
  }
  const hubnav::geo::EarthModel earth;
  const auto imu = hubnav::io::parse_imu(cfg.imu_path);
  const auto gnss = hubnav::io::parse_gnss(cfg.gnss_path);
  if (imu.size() < 2) {
    std::cerr << "fuse: IMU stream too short\n";
    return kExitData;
  }

  const auto initial = hubnav::fusion::initial_state_from_config(cfg);
  const auto result = hubnav::fusion::run_fusion(
      earth, cfg, initial, imu, gnss, parse_disable(args.disable));

  hubnav::io::write_trajectory(joined(cfg.output_dir, "nav.txt"), result.nav);
  hubnav::io::write_param_log(joined(cfg.output_dir, "params.txt"),
                              result.params);
  hubnav::io::write_innovation_log(joined(cfg.output_dir, "innovations.txt"),
                                   result.innovations);
  std::printf("fused %zu imu samples, %zu fixes; %zu updates logged\n",
              imu.size(), gnss.size(), result.innovations.size());
  return kExitOk;
}

int cmd_evaluate(const CommonArgs& args, const std::string& nav_path_arg,
                 const std::string& truth_path_arg, bool per_epoch) {
  const hubnav::io::RunConfig cfg = load_config(args);
  const std::string nav_path =
      nav_path_arg.empty() ? joined(cfg.output_dir, "nav.txt") : nav_path_arg;
  const std::string truth_path =
      truth_path_arg.empty() ? cfg.truth_path : truth_path_arg;
  if (truth_path.empty()) {
    std::cerr << "evaluate: truth path required (paths.truth or --truth)\n";
    return kExitUsage;
  }
  const hubnav::geo::EarthModel earth;
  const auto estimate = hubnav::io::parse_trajectory(nav_path);
  const auto truth = hubnav::io::parse_trajectory(truth_path);
  const auto report = hubnav::eval::evaluate_trajectory(earth, estimate, truth,
                                                        cfg.outage_windows);
  hubnav::eval::write_metrics(joined(cfg.output_dir, "metrics.txt"), report);
  if (per_epoch) {
    hubnav::eval::write_epoch_errors(joined(cfg.output_dir, "epoch_errors.txt"),
                                     hubnav::eval::per_epoch_errors(
                                         earth, estimate, truth));
  }
  std::printf("horizontal RMSE %.4f m, height RMSE %.4f m, heading RMSE %.4f deg"
              " over %zu epochs\n",
              report.horizontal_rmse, report.height_rmse,
              report.heading_rmse_deg, report.epochs);
  for (const auto& w : report.windows) {
    std::printf("outage [%.1f, %.1f): RMSE %.4f m, MAX %.4f m\n", w.start,
                w.end, w.rmse, w.max_error);
  }
  return kExitOk;
}

int cmd_report_params(const CommonArgs& args, const std::string& log_path_arg) {
  const hubnav::io::RunConfig cfg = load_config(args);
  const std::string log_path = log_path_arg.empty()
                                   ? joined(cfg.output_dir, "params.txt")
                                   : log_path_arg;
  const auto log = hubnav::io::parse_param_log(log_path);

  hubnav::eval::ParamTruth truth;
  truth.leverarm = cfg.sim.leverarm_true;
  truth.mounting = cfg.sim.mounting_true;
  truth.radius_scale = cfg.sim.radius_scale_true;
  const auto results =
      hubnav::eval::assess_params(log, truth, hubnav::eval::ConvergenceBands{});

  bool all_converged = true;
  for (const auto& r : results) {
    const bool tracked =
        (r.name.rfind("leverarm", 0) == 0 && cfg.estimate_leverarm) ||
        (r.name.rfind("mounting", 0) == 0 && cfg.estimate_mounting) ||
        (r.name == "radius_scale" && cfg.estimate_radius_scale);
    const bool angle = r.name.rfind("mounting", 0) == 0;
    const double scale = angle ? hubnav::geo::kRadToDeg : 1.0;
    const char* unit = angle ? "deg" : (r.name.rfind("leverarm", 0) == 0 ? "m" : "");
    if (r.converged) {
      std::printf(
          "%-16s converged at %7.1f s, final error %+.5g %s, 1-sigma %.5g %s\n",
          r.name.c_str(), r.time, r.final_error * scale, unit,
          r.final_std * scale, unit);
    } else {
      std::printf("%-16s no convergence (final error %+.5g %s, 1-sigma %.5g %s)\n",
                  r.name.c_str(), r.final_error * scale, unit,
                  r.final_std * scale, unit);
      if (tracked) all_converged = false;
    }
  }
  return all_converged ? kExitOk : kExitNoConvergence;
}

int cmd_montecarlo(const CommonArgs& args, int runs) {
  hubnav::io::RunConfig cfg = load_config(args);
  if (!cfg.has_trajectory) {
    std::cerr << "montecarlo: config has no [trajectory] segments\n";
    return kExitUsage;
  }
  const hubnav::geo::EarthModel earth;
  const auto summary = hubnav::fusion::run_monte_carlo(earth, cfg, runs);

  std::FILE* out = std::fopen(
      joined(cfg.output_dir, "montecarlo.txt").c_str(), "w");
  for (const auto& r : summary.runs) {
    std::printf("seed %llu: position NEES %.3f, pos+vel NEES %.3f, "
                "final horizontal error %.3f m\n",
                static_cast<unsigned long long>(r.seed), r.mean_position_nees,
                r.mean_posvel_nees, r.final_horizontal_error);
    if (out) {
      std::fprintf(out, "seed %llu nees3 %.4f nees6 %.4f final_err %.4f "
                        "symmetric %d min_eig %.3e\n",
                   static_cast<unsigned long long>(r.seed),
                   r.mean_position_nees, r.mean_posvel_nees,
                   r.final_horizontal_error, r.cov_symmetric ? 1 : 0,
                   r.min_cov_eigenvalue);
    }
  }
  std::printf("mean position NEES over %zu runs: %.3f (3 dof)\n",
              summary.runs.size(), summary.mean_position_nees);
  if (out) {
    std::fprintf(out, "mean_nees3 %.4f mean_nees6 %.4f runs %zu\n",
                 summary.mean_position_nees, summary.mean_posvel_nees,
                 summary.runs.size());
    std::fclose(out);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GNSS + wheel-mounted-IMU integrated navigation toolkit"};
  app.require_subcommand(1);

  CommonArgs common;
  std::string nav_path, truth_path, log_path;
  bool per_epoch = false;
  int mc_runs = 20;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "run configuration file")
        ->required();
    sub->add_option("--out", common.out_dir, "output directory override");
    sub->add_option("--seed", common.seed, "simulation seed override")
        ->each([&](const std::string&) { common.seed_set = true; });
    sub->add_option("--outages", common.outages,
                    "outage windows override, e.g. \"100:160,300:360\"");
    sub->add_option("--disable", common.disable,
                    "disable an update type (velocity|gnss|wheel-rate)")
        ->allow_extra_args(false);
  };

  CLI::App* simulate = app.add_subcommand("simulate", "synthesize a scenario");
  add_common(simulate);
  CLI::App* fuse = app.add_subcommand("fuse", "run the fusion filter");
  add_common(fuse);
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "compare an estimate against truth");
  add_common(evaluate);
  evaluate->add_option("--nav", nav_path, "estimate trajectory file");
  evaluate->add_option("--truth", truth_path, "truth trajectory file");
  evaluate->add_flag("--per-epoch", per_epoch, "also write per-epoch errors");
  CLI::App* report =
      app.add_subcommand("report-params", "installation-parameter convergence");
  add_common(report);
  report->add_option("--log", log_path, "parameter log file");
  CLI::App* mc = app.add_subcommand("montecarlo", "multi-seed consistency run");
  add_common(mc);
  mc->add_option("--runs", mc_runs, "number of seeds")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(common);
    if (fuse->parsed()) return cmd_fuse(common);
    if (evaluate->parsed())
      return cmd_evaluate(common, nav_path, truth_path, per_epoch);
    if (report->parsed()) return cmd_report_params(common, log_path);
    if (mc->parsed()) return cmd_montecarlo(common, mc_runs);
  } catch (const hubnav::io::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const hubnav::fusion::FilterDivergence& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const hubnav::io::FormatError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
