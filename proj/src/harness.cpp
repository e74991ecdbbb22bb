#include "cnse/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cnse/snapshot_io.hpp"

namespace cnse {

namespace {

using nlohmann::json;

double number(const json& section, const char* key, double fallback) {
  if (!section.contains(key)) return fallback;
  const json& v = section.at(key);
  if (!v.is_number()) throw ConfigError(std::string("config key '") + key + "' must be a number");
  return v.get<double>();
}

std::string text(const json& section, const char* key, const std::string& fallback) {
  if (!section.contains(key)) return fallback;
  const json& v = section.at(key);
  if (!v.is_string()) throw ConfigError(std::string("config key '") + key + "' must be a string");
  return v.get<std::string>();
}

bool flag(const json& section, const char* key, bool fallback) {
  if (!section.contains(key)) return fallback;
  const json& v = section.at(key);
  if (!v.is_boolean()) throw ConfigError(std::string("config key '") + key + "' must be a boolean");
  return v.get<bool>();
}

const json& section(const json& root, const char* key) {
  static const json empty = json::object();
  if (!root.contains(key)) return empty;
  const json& s = root.at(key);
  if (!s.is_object()) throw ConfigError(std::string("config section '") + key + "' must be an object");
  return s;
}

std::map<std::string, double> number_map(const json& s, const char* key) {
  std::map<std::string, double> out;
  if (!s.contains(key)) return out;
  for (const auto& [k, v] : s.at(key).items()) {
    if (!v.is_number()) throw ConfigError("parameter '" + k + "' must be a number");
    out[k] = v.get<double>();
  }
  return out;
}

void apply_override(json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
    if (!node->is_object()) throw ConfigError("override key '" + key + "' crosses a non-object");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

Limiter parse_limiter(const std::string& s) {
  if (s == "none") return Limiter::None;
  if (s == "minmod") return Limiter::Minmod;
  if (s == "mc") return Limiter::MonotonizedCentral;
  throw ConfigError("unknown limiter '" + s + "'");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string run_file(const std::string& dir, std::size_t index, const char* ext) {
  char name[64];
  std::snprintf(name, sizeof name, "run_%02zu.%s", index, ext);
  return (std::filesystem::path(dir) / name).string();
}

SweepRun execute(const SweepConfig& sweep, const TestPair& pair, double epsilon,
                 const std::string& dir, std::size_t index) {
  SweepRun out;
  out.row.epsilon = epsilon;
  const RunConfig cfg = sweep.config_for(epsilon);
  Trajectory traj;
  try {
    traj = run(cfg);
  } catch (const BlowUpError& e) {
    out.row.blew_up = true;
    out.row.blowup_time = e.time();
    out.row.error = e.what();
    return out;
  }
  ReportOptions options = sweep.diagnostics;
  if (epsilon == 0.0) options.pairing_route_b = false;
  CriteriaReport rep = criteria_report(traj, pair, options);
  SweepRow& r = out.row;
  r.e_rel_final = rep.e_rel_final;
  r.kato = rep.kato;
  r.pairing_a = rep.pairing_a;
  r.pairing_b = rep.pairing_b;
  r.ckv_integral = rep.ckv_integral;
  r.theta0_hat = rep.theta0_hat;
  r.gronwall_margin = rep.gronwall.margin;
  r.gronwall_slack = rep.gronwall.slack;
  r.gronwall_pass = rep.gronwall.pass;
  r.max_balance_residual = rep.max_balance_residual;
  r.floor_activations = rep.floor_activations;
  r.steps = traj.steps;
  out.report_csv = report_csv(rep);
  out.report = std::move(rep);
  if (!dir.empty()) {
    write_text_file(run_file(dir, index, "csv"), out.report_csv);
    if (sweep.write_snapshots) write_snapshots(run_file(dir, index, "snap"), traj);
  }
  return out;
}

}  // namespace

double TestPairSpec::param(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

TestPairPtr make_test_pair(const TestPairSpec& spec, const RunConfig& base) {
  const Grid& g = base.grid;
  if (spec.name == "zero") {
    Profile p;
    p.amplitude = 0.0;
    p.Ly = g.Ly;
    return std::make_shared<ShearPair>(p, spec.param("r0", 1.0));
  }
  if (spec.name == "shear") {
    Profile p;
    const int mode = static_cast<int>(spec.param("mode", 0.0));
    if (mode < 0 || mode > 2) throw ConfigError("shear test pair: mode must be 0, 1 or 2");
    p.kind = mode == 0 ? Profile::Kind::Sin : mode == 1 ? Profile::Kind::Cos : Profile::Kind::Linear;
    p.amplitude = spec.param("amplitude", 1.0);
    p.k = spec.param("k", 1.0);
    p.offset = spec.param("offset", 0.0);
    p.Ly = g.Ly;
    return std::make_shared<ShearPair>(p, spec.param("r0", 1.0));
  }
  if (spec.name == "oscillating_shear") return oscillating_shear_pair(spec.param("amplitude", 1.0), g.Ly);
  if (spec.name == "channel_cell")
    return channel_cell_pair(spec.param("A", 1.0), spec.param("B", 0.1), g.Lx, g.Ly);
  if (spec.name == "fourier") {
    FourierPairParams p;
    p.r0 = spec.param("r0", p.r0);
    p.a = spec.param("a", p.a);
    p.k1 = static_cast<int>(spec.param("k1", p.k1));
    p.k2 = static_cast<int>(spec.param("k2", p.k2));
    p.omega = spec.param("omega", p.omega);
    p.phase = spec.param("phase", p.phase);
    p.b = spec.param("b", p.b);
    p.l1 = static_cast<int>(spec.param("l1", p.l1));
    p.l2 = static_cast<int>(spec.param("l2", p.l2));
    p.phase2 = spec.param("phase2", p.phase2);
    p.nu = spec.param("nu", p.nu);
    return fourier_pair(p, g.Lx, g.Ly);
  }
  if (spec.name == "euler_numeric") {
    const int refine = static_cast<int>(spec.param("refine", 2.0));
    return euler_numeric_reference(base, refine, spec.param("snapshot_dt", 0.025));
  }
  throw ConfigError("unknown test pair '" + spec.name + "'");
}

void SweepConfig::validate() const {
  if (epsilons.empty()) throw ConfigError("sweep: epsilon list is empty");
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    const double e = epsilons[k];
    const bool anchor = e == 0.0 && k + 1 == epsilons.size();
    if (!(e > 0.0) && !anchor) throw ConfigError("sweep: epsilons must be > 0 (0 only as the last entry)");
    if (k > 0 && !(e < epsilons[k - 1])) throw ConfigError("sweep: epsilons must be strictly decreasing");
  }
  if (slip_law.kind == SlipLaw::Kind::Power && !(slip_law.lambda0 >= 0.0))
    throw ConfigError("sweep: lambda0 must be >= 0");
  if (parallelism < 1) throw ConfigError("sweep: parallelism must be >= 1");
  for (double e : epsilons) config_for(e).validate();
}

RunConfig SweepConfig::config_for(double epsilon) const {
  RunConfig cfg = base;
  cfg.epsilon = epsilon;
  cfg.gas.slip_law = slip_law;
  if (epsilon == 0.0 && cfg.grid.has_walls()) {
    cfg.bc = BcSpec::navier_slip(0.0);
  } else {
    cfg.bc = BcSpec::from_slip_law(slip_law, epsilon, cfg.grid.topology);
  }
  return cfg;
}

SweepConfig parse_config(const std::string& json_text, const std::vector<std::string>& overrides) {
  json root = json::parse(json_text, nullptr, false, true);
  if (root.is_discarded() || !root.is_object()) throw ConfigError("config is not a JSON object");
  for (const std::string& o : overrides) apply_override(root, o);

  SweepConfig sc;
  RunConfig& rc = sc.base;
  const json& grid = section(root, "grid");
  const std::string topo = text(grid, "topology", "torus");
  if (topo != "torus" && topo != "channel") throw ConfigError("grid.topology must be torus or channel");
  rc.grid = Grid::make(static_cast<int>(number(grid, "nx", 128)), static_cast<int>(number(grid, "ny", 128)),
                       number(grid, "Lx", 1.0), number(grid, "Ly", 1.0),
                       topo == "torus" ? Topology::Torus : Topology::Channel);

  const json& gas = section(root, "gas");
  rc.gas.a0 = number(gas, "a0", rc.gas.a0);
  rc.gas.gamma = number(gas, "gamma", rc.gas.gamma);
  rc.gas.mu = number(gas, "mu", rc.gas.mu);
  rc.gas.eta = number(gas, "eta", rc.gas.eta);

  const json& bc = section(root, "bc");
  const std::string kind = text(bc, "kind", rc.grid.has_walls() ? "navier_slip" : "none");
  if (kind == "no_slip") {
    sc.slip_law = SlipLaw::no_slip();
  } else if (kind == "navier_slip" || kind == "none") {
    sc.slip_law = SlipLaw::power(number(bc, "lambda0", 0.0), number(bc, "alpha", 1.0));
  } else {
    throw ConfigError("bc.kind must be navier_slip, no_slip or none");
  }
  rc.gas.slip_law = sc.slip_law;
  rc.gas.validate();

  const json& run_s = section(root, "run");
  rc.epsilon = number(run_s, "epsilon", 0.01);
  rc.t_final = number(run_s, "t_final", 0.5);
  rc.cfl = number(run_s, "cfl", 0.4);
  rc.snapshot_dt = number(run_s, "snapshot_dt", 0.05);
  rc.rho_floor = number(run_s, "rho_floor", 1e-10);
  rc.limiter = parse_limiter(text(run_s, "limiter", "none"));

  const json& init = section(root, "initial");
  rc.initial.name = text(init, "name", "rest");
  rc.initial.params = number_map(init, "params");

  const json& sweep = section(root, "sweep");
  if (sweep.contains("epsilons")) {
    for (const json& e : sweep.at("epsilons")) {
      if (!e.is_number()) throw ConfigError("sweep.epsilons must hold numbers");
      sc.epsilons.push_back(e.get<double>());
    }
  } else {
    sc.epsilons.push_back(rc.epsilon);
  }
  sc.parallelism = static_cast<int>(number(sweep, "parallelism", 1));

  const json& tp = section(root, "testpair");
  sc.testpair.name = text(tp, "name", "zero");
  sc.testpair.params = number_map(tp, "params");

  const json& diag = section(root, "diagnostics");
  sc.diagnostics.strip_factor = number(diag, "strip_factor", sc.diagnostics.strip_factor);
  sc.diagnostics.layer_c0 = number(diag, "layer_c0", sc.diagnostics.layer_c0);
  sc.diagnostics.split = number(diag, "split", sc.diagnostics.split);
  sc.diagnostics.slack_fraction = number(diag, "slack_fraction", sc.diagnostics.slack_fraction);
  sc.diagnostics.pairing_route_b = flag(diag, "pairing_route_b", sc.diagnostics.pairing_route_b);

  const json& out = section(root, "output");
  sc.output_dir = text(out, "dir", "");
  sc.write_snapshots = flag(out, "snapshots", false);

  sc.validate();
  return sc;
}

SweepConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  return parse_config(read_text_file(path), overrides);
}

SweepResult run_sweep(const SweepConfig& sweep) {
  sweep.validate();
  const std::string dir = sweep.output_dir.empty() ? "" : resolve_output_dir(sweep.output_dir);
  if (!dir.empty()) std::filesystem::create_directories(dir);
  const TestPairPtr pair = make_test_pair(sweep.testpair, sweep.config_for(sweep.epsilons.front()));

  const std::size_t n = sweep.epsilons.size();
  SweepResult result;
  result.runs.resize(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      try {
        result.runs[k] = execute(sweep, *pair, sweep.epsilons[k], dir, k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(sweep.parallelism), n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<SweepRow> rows;
  for (const SweepRun& r : result.runs) rows.push_back(r.row);
  result.summary_csv = summary_csv(rows);
  if (!dir.empty()) {
    const std::filesystem::path d(dir);
    write_text_file((d / "summary.csv").string(), result.summary_csv);
    write_text_file((d / "plot.gp").string(), plot_script("summary.csv", "summary.png"));
  }
  return result;
}

std::string summary_csv(const std::vector<SweepRow>& rows) {
  std::string out = kSummaryHeader;
  out += '\n';
  for (const SweepRow& r : rows) {
    out += fmt(r.epsilon);
    if (r.blew_up) {
      out += ",blowup";
      for (int k = 0; k < 15; ++k) out += ',';
      out += '\n';
      continue;
    }
    out += ",ok";
    for (double v : {r.e_rel_final, r.kato.total(), r.kato.h, r.kato.u, r.kato.grad, r.pairing_a,
                     r.pairing_b, r.ckv_integral}) {
      out += ',';
      out += fmt(v);
    }
    out += ',';
    if (r.theta0_hat) out += fmt(*r.theta0_hat);
    out += ',' + fmt(r.gronwall_margin) + ',' + fmt(r.gronwall_slack);
    out += r.gronwall_pass ? ",1" : ",0";
    out += ',' + fmt(r.max_balance_residual);
    out += ',' + std::to_string(r.floor_activations) + ',' + std::to_string(r.steps) + '\n';
  }
  return out;
}

std::vector<std::pair<double, double>> summary_column(const std::string& csv_text,
                                                      const std::string& column) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("summary CSV is empty");
  const std::vector<std::string> header = split(line, ',');
  const auto it = std::find(header.begin(), header.end(), column);
  if (it == header.end()) throw ConfigError("summary CSV has no column '" + column + "'");
  const std::size_t col = static_cast<std::size_t>(it - header.begin());
  const auto status = std::find(header.begin(), header.end(), "status");
  std::vector<std::pair<double, double>> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line, ',');
    if (cells.size() != header.size()) throw ConfigError("summary CSV row has the wrong arity: " + line);
    if (status != header.end() && cells[static_cast<std::size_t>(status - header.begin())] != "ok")
      continue;
    if (cells[col].empty()) continue;
    out.emplace_back(std::stod(cells[0]), std::stod(cells[col]));
  }
  return out;
}

RateEstimate estimate_rate(const std::string& quantity,
                           const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 3)
    throw std::invalid_argument("estimate_rate(" + quantity + "): need at least 3 points, got " +
                                std::to_string(pairs.size()));
  std::string bad;
  for (const auto& [e, v] : pairs) {
    if (!(e > 0.0) || !(v > 0.0)) bad += " (" + fmt(e) + ", " + fmt(v) + ")";
  }
  if (!bad.empty())
    throw std::invalid_argument("estimate_rate(" + quantity + "): nonpositive entries:" + bad);
  RateEstimate out;
  out.quantity = quantity;
  out.pairs = pairs;
  const double n = static_cast<double>(pairs.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [e, v] : pairs) {
    mx += std::log(e);
    my += std::log(v);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [e, v] : pairs) {
    const double dx = std::log(e) - mx;
    const double dy = std::log(v) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw std::invalid_argument("estimate_rate(" + quantity + "): all epsilons equal");
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  const double ss_res = std::max(0.0, syy - out.slope * sxy);
  out.r2 = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  return out;
}

std::string plot_script(const std::string& summary_csv_path, const std::string& image_path) {
  std::string s;
  s += "set datafile separator ','\n";
  s += "set datafile missing ''\n";
  s += "set terminal pngcairo size 900,600\n";
  s += "set output '" + image_path + "'\n";
  s += "set logscale xy\n";
  s += "set format xy '%.0e'\n";
  s += "set xlabel 'epsilon'\n";
  s += "set key top left\n";
  s += "set grid\n";
  s += "plot '" + summary_csv_path + "' using 1:3 skip 1 with linespoints title 'E_rel(T)', \\\n";
  s += "     '" + summary_csv_path + "' using 1:4 skip 1 with linespoints title 'K', \\\n";
  s += "     '" + summary_csv_path + "' using 1:(abs($8)) skip 1 with linespoints title '|P|'\n";
  return s;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError("failed to write " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string resolve_output_dir(const std::string& dir) {
  const std::filesystem::path p(dir);
  const char* root = std::getenv("CNSE_OUTPUT_ROOT");
  if (p.is_absolute() || root == nullptr || *root == '\0') return dir;
  return (std::filesystem::path(root) / p).string();
}

}  // namespace cnse
