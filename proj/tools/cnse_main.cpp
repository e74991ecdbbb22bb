#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cnse/diagnostics.hpp"
#include "cnse/harness.hpp"
#include "cnse/snapshot_io.hpp"

namespace {

struct Overrides {
  std::vector<std::string> sets;
  double epsilon = -1.0;
  double t_final = -1.0;
  int parallelism = 0;
  std::string output;

  void add(CLI::App* app) {
    app->add_option("--set", sets, "Override a config key, e.g. --set grid.nx=64");
    app->add_option("--epsilon", epsilon, "Viscosity scale (single epsilon)");
    app->add_option("--t-final", t_final, "Final time");
    app->add_option("--output", output, "Output directory");
  }

  std::vector<std::string> all() const {
    std::vector<std::string> out = sets;
    if (epsilon >= 0.0) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "run.epsilon=%.17g", epsilon);
      out.push_back(buf);
      std::snprintf(buf, sizeof buf, "sweep.epsilons=[%.17g]", epsilon);
      out.push_back(buf);
    }
    if (t_final >= 0.0) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "run.t_final=%.17g", t_final);
      out.push_back(buf);
    }
    if (parallelism > 0) out.push_back("sweep.parallelism=" + std::to_string(parallelism));
    if (!output.empty()) out.push_back("output.dir=\"" + output + "\"");
    return out;
  }
};

void print_summary(const cnse::SweepResult& result) {
  for (const cnse::SweepRun& r : result.runs) {
    if (r.row.blew_up) {
      std::printf("eps=%-10.4g blow-up at t=%.6g: %s\n", r.row.epsilon, r.row.blowup_time,
                  r.row.error.c_str());
      continue;
    }
    std::printf("eps=%-10.4g Erel(T)=%.6e K=%.6e P=%.6e M=%.6e gronwall=%s steps=%d\n",
                r.row.epsilon, r.row.e_rel_final, r.row.kato.total(), r.row.pairing_a,
                r.row.ckv_integral, r.row.gronwall_pass ? "pass" : "FAIL", r.row.steps);
  }
}

int cmd_sweep(const std::string& config, const Overrides& ov, bool single) {
  cnse::SweepConfig sc = cnse::load_config(config, ov.all());
  if (single && sc.epsilons.size() != 1)
    throw cnse::ConfigError("run: config lists several epsilons, use the sweep subcommand");
  const cnse::SweepResult result = cnse::run_sweep(sc);
  print_summary(result);
  if (!sc.output_dir.empty())
    std::printf("wrote %s\n", cnse::resolve_output_dir(sc.output_dir).c_str());
  return 0;
}

int cmd_diagnose(const std::string& config, const std::string& snapshots, const Overrides& ov) {
  const cnse::SweepConfig sc = cnse::load_config(config, ov.all());
  cnse::Trajectory traj = cnse::read_snapshots(snapshots);
  if (traj.snapshots.empty()) throw cnse::IoError(snapshots + " holds no snapshots");
  const double eps = traj.config.epsilon;
  cnse::RunConfig cfg = sc.config_for(eps);
  if (!(cfg.grid == traj.config.grid)) throw cnse::ConfigError("snapshot grid differs from the config grid");
  cfg.gas.a0 = traj.config.gas.a0;
  cfg.gas.gamma = traj.config.gas.gamma;
  cfg.gas.mu = traj.config.gas.mu;
  cfg.gas.eta = traj.config.gas.eta;
  traj.config = cfg;
  const cnse::TestPairPtr pair = cnse::make_test_pair(sc.testpair, cfg);
  const cnse::CriteriaReport rep = cnse::criteria_report(traj, *pair, sc.diagnostics);
  const std::string csv = cnse::report_csv(rep);
  if (sc.output_dir.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    const std::string dir = cnse::resolve_output_dir(sc.output_dir);
    std::filesystem::create_directories(dir);
    cnse::write_text_file((std::filesystem::path(dir) / "diagnose.csv").string(), csv);
    std::printf("wrote %s/diagnose.csv\n", dir.c_str());
  }
  return 0;
}

int cmd_rate(const std::string& summary, const std::string& column) {
  const auto pairs = cnse::summary_column(cnse::read_text_file(summary), column);
  const cnse::RateEstimate r = cnse::estimate_rate(column, pairs);
  std::printf("%s: slope=%.6f R2=%.6f points=%zu\n", column.c_str(), r.slope, r.r2, r.pairs.size());
  return 0;
}

int cmd_report(const std::string& summary, const std::string& script, const std::string& image) {
  const std::filesystem::path out = script.empty()
                                        ? std::filesystem::path(summary).parent_path() / "plot.gp"
                                        : std::filesystem::path(script);
  const std::string csv_name =
      std::filesystem::relative(summary, out.parent_path().empty() ? "." : out.parent_path()).string();
  cnse::write_text_file(out.string(), cnse::plot_script(csv_name, image));
  std::printf("wrote %s\n", out.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressible Navier-Stokes inviscid-limit experiments"};
  app.require_subcommand(1);

  std::string config, snapshots, summary, column = "Erel_T", script, image = "summary.png";
  Overrides run_ov, sweep_ov, diag_ov;

  CLI::App* run_cmd = app.add_subcommand("run", "Run one configuration and write its report");
  run_cmd->add_option("config", config, "JSON config file")->required()->check(CLI::ExistingFile);
  run_ov.add(run_cmd);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run an epsilon sweep");
  sweep_cmd->add_option("config", config, "JSON config file")->required()->check(CLI::ExistingFile);
  sweep_ov.add(sweep_cmd);
  sweep_cmd->add_option("--parallelism", sweep_ov.parallelism, "Concurrent runs");

  CLI::App* diag_cmd = app.add_subcommand("diagnose", "Recompute diagnostics from stored snapshots");
  diag_cmd->add_option("config", config, "JSON config file")->required()->check(CLI::ExistingFile);
  diag_cmd->add_option("snapshots", snapshots, "Snapshot file")->required()->check(CLI::ExistingFile);
  diag_cmd->add_option("--set", diag_ov.sets, "Override a config key");
  diag_cmd->add_option("--output", diag_ov.output, "Output directory");

  CLI::App* rate_cmd = app.add_subcommand("rate", "Fit a log-log rate to a summary column");
  rate_cmd->add_option("summary", summary, "Summary CSV")->required()->check(CLI::ExistingFile);
  rate_cmd->add_option("--column", column, "Column to fit");

  CLI::App* report_cmd = app.add_subcommand("report", "Write a plot script for a summary CSV");
  report_cmd->add_option("summary", summary, "Summary CSV")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--script", script, "Script path (default: plot.gp next to the CSV)");
  report_cmd->add_option("--image", image, "Image file the script renders");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_sweep(config, run_ov, true);
    if (*sweep_cmd) return cmd_sweep(config, sweep_ov, false);
    if (*diag_cmd) return cmd_diagnose(config, snapshots, diag_ov);
    if (*rate_cmd) return cmd_rate(summary, column);
    if (*report_cmd) return cmd_report(summary, script, image);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
