#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cnse/diagnostics.hpp"
#include "cnse/reference.hpp"
#include "cnse/solver.hpp"

namespace cnse {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Named test pair: zero, shear, oscillating_shear, channel_cell, fourier, euler_numeric.
struct TestPairSpec {
  std::string name = "zero";
  std::map<std::string, double> params;
  double param(const std::string& key, double fallback) const;
};

/// Build the test pair for a sweep. euler_numeric runs the Euler reference of `base`.
TestPairPtr make_test_pair(const TestPairSpec& spec, const RunConfig& base);

struct SweepConfig {
  RunConfig base;
  std::vector<double> epsilons;  // strictly decreasing, > 0, optionally ending with 0
  SlipLaw slip_law;              // lambda(eps) = lambda0 eps^alpha, or no-slip
  TestPairSpec testpair;
  ReportOptions diagnostics;
  std::string output_dir;        // empty: nothing written
  int parallelism = 1;
  bool write_snapshots = false;

  void validate() const;
  /// base with epsilon, slip law and the matching wall condition filled in.
  RunConfig config_for(double epsilon) const;
};

/// Parse a JSON config (sections grid, gas, bc, run, initial, sweep, testpair, diagnostics,
/// output). Each override is "dotted.key=value" with value read as JSON, else as a string.
SweepConfig parse_config(const std::string& json_text,
                         const std::vector<std::string>& overrides = {});
SweepConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

struct SweepRow {
  double epsilon = 0.0;
  bool blew_up = false;
  double blowup_time = 0.0;
  std::string error;
  double e_rel_final = 0.0;
  KatoComponents kato;
  double pairing_a = 0.0;
  double pairing_b = 0.0;
  double ckv_integral = 0.0;
  std::optional<double> theta0_hat;
  double gronwall_margin = 0.0;
  double gronwall_slack = 0.0;
  bool gronwall_pass = false;
  double max_balance_residual = 0.0;
  int floor_activations = 0;
  int steps = 0;
};

struct SweepRun {
  SweepRow row;
  std::optional<CriteriaReport> report;
  std::string report_csv;  // empty after a blow-up
};

struct SweepResult {
  std::vector<SweepRun> runs;  // in configured (descending) epsilon order
  std::string summary_csv;
};

/// Execute every epsilon (up to `parallelism` at once), diagnose each run against the test
/// pair and, when output_dir is set, write run_NN.csv, summary.csv and plot.gp there.
SweepResult run_sweep(const SweepConfig& sweep);

inline constexpr const char* kSummaryHeader =
    "epsilon,status,Erel_T,K,K_H,K_u,K_grad,P,P_b,M_int,theta0_hat,gronwall_margin,"
    "gronwall_slack,gronwall_pass,balance_max,floor_activations,steps";

/// One row per epsilon; blow-up rows carry status "blowup" and empty numeric fields.
std::string summary_csv(const std::vector<SweepRow>& rows);

/// (epsilon, value) pairs of one summary column, skipping blow-up rows.
std::vector<std::pair<double, double>> summary_column(const std::string& csv_text,
                                                      const std::string& column);

struct RateEstimate {
  std::string quantity;
  std::vector<std::pair<double, double>> pairs;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least-squares slope of log(value) against log(epsilon).
RateEstimate estimate_rate(const std::string& quantity,
                           const std::vector<std::pair<double, double>>& pairs);

/// Self-contained gnuplot script plotting Erel_T, K and |P| against epsilon on log-log axes.
std::string plot_script(const std::string& summary_csv_path, const std::string& image_path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Relative directories are placed under $CNSE_OUTPUT_ROOT when it is set.
std::string resolve_output_dir(const std::string& dir);

}  // namespace cnse
