#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cnse/diagnostics.hpp"
#include "cnse/harness.hpp"
#include "cnse/reference.hpp"
#include "cnse/stress.hpp"

using namespace cnse;

namespace {

constexpr double kPi = std::numbers::pi;

// Pinned tolerances.
constexpr double kTraceSlopeMin = 1.8;
constexpr double kThermoTol = 1e-12;
constexpr double kCoercivityTol = 1e-10;
constexpr double kBalanceFraction = 1e-3;
constexpr double kBalanceOrderMin = 1.0;
constexpr double kBalanceSeconds = 120.0;
constexpr double kReductionTol = 1e-8;
constexpr double kTorusSlopeMin = 0.7;
constexpr double kTorusSlopeMax = 1.3;
constexpr double kTorusSeconds = 900.0;
constexpr double kNoSlipGradSlopeMax = 0.25;
constexpr double kChannelSeconds = 1200.0;
constexpr double kPairingSlopeMin = 0.8;
constexpr double kLayerVariationMax = 0.2;
constexpr double kCkvTol = 1e-12;

const std::vector<double> kEpsilons{1e-2, 3e-3, 1e-3, 3e-4, 1e-4};

struct Outcome {
  bool pass = false;
  std::string detail;
  std::string record;  // byte-exact outputs compared by the determinism check
};

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

std::string fmt(const char* format, ...) {
  char buf[1024];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

std::string exact(double v) { return fmt("%.17g", v); }

std::string list(const std::vector<double>& v, const char* format = "%.3e") {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : " ") + fmt(format, x);
  return out;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t k = 0; k < x.size(); ++k) pairs.emplace_back(x[k], y[k]);
  return estimate_rate("fit", pairs).slope;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] < v[k - 1])) return false;
  return true;
}

VectorField fill(const Grid& g, const std::function<Vec2(double, double)>& f) {
  VectorField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out.set(g.index(i, j), f(g.xc(i), g.yc(j)));
  return out;
}

double max_trace_gap(const BoundaryTrace& a, const BoundaryTrace& b) {
  double m = 0.0;
  for (Wall w : {Wall::Bottom, Wall::Top})
    for (std::size_t i = 0; i < a.on(w).values.size(); ++i)
      m = std::max(m, std::abs(a.on(w).values[i] - b.on(w).values[i]));
  return m;
}

std::string config_path(const char* name) { return std::string(CNSE_CONFIG_DIR) + "/" + name; }

std::string sweep_record(const SweepResult& r) {
  std::string out = r.summary_csv;
  for (const SweepRun& run : r.runs) out += run.report_csv;
  return out;
}

std::vector<double> column(const SweepResult& r, const std::string& name) {
  std::vector<double> out;
  for (const auto& [eps, v] : summary_column(r.summary_csv, name)) out.push_back(v);
  return out;
}

// 1. Wall stress versus its vorticity form.
Outcome stress_trace_lemma() {
  GasModel m;
  m.mu = 0.8;
  m.eta = 1.1;
  const std::vector<std::function<Vec2(double, double)>> fields{
      [](double x, double y) {
        return Vec2{std::cos(kPi * y) + 0.4 * std::sin(2 * kPi * x) * y,
                    0.3 * std::sin(kPi * y) * std::cos(2 * kPi * x)};
      },
      [](double, double y) { return Vec2{std::sin(kPi * y), 0.0}; },
      [](double x, double y) {
        return Vec2{std::exp(y) * std::cos(2 * kPi * x), 0.5 * std::sin(2 * kPi * y) * std::sin(2 * kPi * x)};
      },
      [](double x, double y) {
        return Vec2{std::cos(2 * kPi * x + y), y * (1 - y) * std::cos(2 * kPi * x)};
      },
      [](double x, double y) {
        return Vec2{std::sin(3 * y) + 0.2 * std::cos(4 * kPi * x), std::sin(kPi * y) * std::sin(kPi * y) * std::sin(2 * kPi * x)};
      }};
  Outcome out{true, "slopes", ""};
  for (const auto& f : fields) {
    std::vector<double> h, err;
    for (int n : {64, 128, 256}) {
      const Grid g = Grid::make(n, n, 1.0, 1.0, Topology::Channel);
      const VectorField u = fill(g, f);
      h.push_back(1.0 / n);
      err.push_back(max_trace_gap(boundary_stress_tangential(m, u), vorticity_trace_form(m, u)));
    }
    const double s = fit_slope(h, err);
    out.pass = out.pass && s >= kTraceSlopeMin;
    out.detail += fmt(" %.3f", s);
    for (double e : err) out.record += exact(e) + ",";
  }
  out.detail += fmt(" (need >= %.1f)", kTraceSlopeMin);
  return out;
}

// 2. Relative entropy algebra.
Outcome relative_entropy_algebra() {
  double identity_gap = 0.0, closed_gap = 0.0;
  for (double gamma : {1.2, 1.4, 5.0 / 3.0, 2.0, 3.0}) {
    GasModel m;
    m.gamma = gamma;
    for (int a = 0; a <= 30; ++a) {
      const double r = 0.5 + 1.5 * a / 30.0;
      for (int b = 0; b <= 100; ++b) {
        const double rho = 10.0 * b / 100.0;
        const double H = std::pow(rho, gamma) / (gamma - 1.0);
        const double Hr = std::pow(r, gamma) / (gamma - 1.0);
        const double Hpr = gamma * std::pow(r, gamma - 1.0) / (gamma - 1.0);
        const double direct = H - Hr - Hpr * (rho - r);
        identity_gap = std::max(identity_gap, std::abs(h_relative(m, rho, r) - direct) / std::max(1.0, std::abs(H)));
        if (gamma == 2.0)
          closed_gap = std::max(closed_gap, std::abs(h_relative(m, rho, r) - (rho - r) * (rho - r)));
      }
    }
  }
  GasModel m2;
  m2.gamma = 2.0;
  GasModel m14;
  m14.gamma = 1.4;
  const EquivalenceConstants e2 = equiv_constants(m2, 0.5, 2.0, 10.0);
  const EquivalenceConstants e14 = equiv_constants(m14, 0.5, 2.0, 10.0);
  const double c2 = bregman_coercivity_constant(m2, 0.5, 2.0, 10.0);
  const double c14 = bregman_coercivity_constant(m14, 0.5, 2.0, 10.0);
  const bool finite = std::isfinite(e2.c_low) && std::isfinite(e2.c_high) && std::isfinite(e14.c_low) &&
                      std::isfinite(e14.c_high) && std::isfinite(c14) && e2.c_low > 0 && e14.c_low > 0;
  Outcome out;
  out.pass = identity_gap <= kThermoTol && closed_gap <= kThermoTol && finite &&
             std::abs(c2 - 2.0) <= kCoercivityTol;
  out.detail = fmt("identity gap %.2e, gamma=2 gap %.2e, c0(gamma=2)=%.12f, c0(1.4)=%.6f, band(1.4)=[%.4f, %.4f]",
                   identity_gap, closed_gap, c2, c14, e14.c_low, e14.c_high);
  out.record = exact(identity_gap) + exact(closed_gap) + exact(c2) + exact(c14) + exact(e14.c_low) + exact(e14.c_high);
  return out;
}

RunConfig shear_balance_config(int n) {
  RunConfig c;
  c.grid = Grid::make(n, n, 1.0, 1.0, Topology::Channel);
  c.gas.gamma = 1.4;
  c.gas.mu = 1.0;
  c.gas.eta = 1.0;
  c.bc = BcSpec::no_slip();
  c.epsilon = 1e-2;
  c.t_final = 0.5;
  c.initial = {"shear", {{"mode", 0.0}, {"amplitude", 1.0}}};
  return c;
}

struct BalanceRuns {
  Outcome outcome;
  GronwallResult gronwall;
};

// 3. Energy inequality for the no-slip shear.
BalanceRuns energy_inequality() {
  BalanceRuns out;
  std::vector<double> h, err;
  double worst_ratio = -kInfinity;
  double seconds = 0.0;
  for (int n : {32, 64, 128}) {
    const Timer timer;
    const RunConfig c = shear_balance_config(n);
    const Trajectory t = run(c);
    const double e0 = t.log.front().energy;
    double babs = 0.0;
    for (const BalancePoint& b : energy_balance_residual(t)) {
      babs = std::max(babs, std::abs(b.residual));
      if (n == 128) worst_ratio = std::max(worst_ratio, b.residual / e0);
    }
    h.push_back(1.0 / n);
    err.push_back(babs);
    if (n == 128) {
      Profile p;
      const CriteriaReport rep = criteria_report(t, ShearPair(p, 1.0));
      out.gronwall = rep.gronwall;
      out.outcome.record += report_csv(rep);
      seconds = timer.seconds();
    }
  }
  const double order = fit_slope(h, err);
  out.outcome.pass = worst_ratio <= kBalanceFraction && order >= kBalanceOrderMin && seconds <= kBalanceSeconds;
  out.outcome.detail = fmt("max B/E(0) at 128^2 = %.3e (need <= %.0e); |B| = %s, order %.3f (need >= %.1f); 128^2 run %.0f s",
                           worst_ratio, kBalanceFraction, list(err).c_str(), order, kBalanceOrderMin, seconds);
  for (double e : err) out.outcome.record += exact(e) + ",";
  return out;
}

// 4. Full and reduced remainder.
Outcome remainder_reduction() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> coef(-0.4, 0.4);
  std::uniform_int_distribution<int> wave(1, 3);
  double worst = 0.0;
  std::string record;
  for (int trial = 0; trial < 10; ++trial) {
    const bool channel = trial % 2 == 1;
    const Grid g = Grid::make(48, 48, 1.0, 1.0, channel ? Topology::Channel : Topology::Torus);
    GasModel m;
    m.gamma = 1.2 + 0.15 * trial;
    m.mu = 0.5 + 0.1 * trial;
    m.eta = 1.5 - 0.1 * trial;
    TestPairPtr pair;
    if (channel) {
      pair = channel_cell_pair(1.0 + coef(rng), coef(rng), 1.0, 1.0);
    } else {
      FourierPairParams fp;
      fp.a = 0.2 * coef(rng);
      fp.k1 = wave(rng);
      fp.k2 = wave(rng) - 2;
      fp.b = coef(rng);
      fp.l1 = wave(rng) - 2;
      fp.l2 = wave(rng);
      fp.omega = 1.0 + coef(rng);
      fp.nu = 1.0 + coef(rng);
      pair = fourier_pair(fp, 1.0, 1.0);
    }
    const double a = coef(rng), b = coef(rng), c = coef(rng), d = coef(rng), e = coef(rng);
    const int kx = wave(rng), ky = wave(rng);
    const auto u = [&](double x, double y) {
      const double vy = channel ? std::sin(kPi * y) : std::cos(2 * kPi * ky * y + e);
      return Vec2{c + d * std::cos(2 * kPi * ky * y + a), b * std::sin(2 * kPi * kx * x) * vy};
    };
    const double time = 0.1 * trial;
    State s(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double x = g.xc(i), y = g.yc(j);
        const double rho = 1.0 + a * std::sin(2 * kPi * kx * x + b) * std::cos(kPi * ky * y);
        const Vec2 v = u(x, y);
        s.rho(i, j) = rho;
        s.mom.x(i, j) = rho * v.x;
        s.mom.y(i, j) = rho * v.y;
      }
    s.time = time;
    s.epsilon = 0.01 * (trial + 1);
    VectorWallValues wall;
    if (channel) {
      for (int i = 0; i < g.nx; ++i) {
        wall.x.bottom.push_back(u(g.xc(i), 0.0).x);
        wall.x.top.push_back(u(g.xc(i), 1.0).x);
        wall.y.bottom.push_back(0.0);
        wall.y.top.push_back(0.0);
      }
    }
    const BcSpec bc = channel ? BcSpec::navier_slip(0.2 * trial) : BcSpec::none();
    const PairSample ps = pair->sample(g, m, time);
    const double full = remainder_full(s, wall, m, bc, ps);
    const double reduced = remainder_reduced(s, wall, m, bc, ps).total();
    worst = std::max(worst, std::abs(full - reduced) / std::abs(full));
    record += exact(full) + "," + exact(reduced) + ";";
  }
  return {worst <= kReductionTol, fmt("worst relative gap %.2e over 10 cases (need <= %.0e)", worst, kReductionTol), record};
}

struct TorusRuns {
  Outcome outcome;
  std::vector<bool> gronwall;
};

// 5. Torus inviscid limit.
TorusRuns torus_limit(int parallelism) {
  const Timer timer;
  SweepConfig sc = load_config(config_path("torus_sweep.json"));
  sc.output_dir.clear();
  sc.parallelism = parallelism;
  const SweepResult r = run_sweep(sc);
  const double seconds = timer.seconds();
  TorusRuns out;
  const std::vector<double> e = column(r, "Erel_T");
  bool complete = e.size() == kEpsilons.size();
  const double slope = complete ? fit_slope(kEpsilons, e) : NAN;
  for (const SweepRun& run : r.runs) out.gronwall.push_back(!run.row.blew_up && run.row.gronwall_pass);
  out.outcome.pass = complete && strictly_decreasing(e) && slope >= kTorusSlopeMin &&
                     slope <= kTorusSlopeMax && seconds <= kTorusSeconds;
  out.outcome.detail = fmt("E_rel(T) = %s, decreasing %s, slope %.3f (need [%.1f, %.1f]), %.0f s",
                           list(e).c_str(), strictly_decreasing(e) ? "yes" : "no", slope, kTorusSlopeMin,
                           kTorusSlopeMax, seconds);
  out.outcome.record = sweep_record(r);
  return out;
}

// 6. Gronwall inequality on the runs of criteria 3 and 5.
Outcome gronwall_inequality(const BalanceRuns& balance, const TorusRuns& torus) {
  Outcome out;
  int passed = balance.gronwall.pass ? 1 : 0;
  for (bool g : torus.gronwall) passed += g ? 1 : 0;
  const int total = 1 + static_cast<int>(torus.gronwall.size());
  out.pass = passed == total;
  out.detail = fmt("%d of %d runs pass; shear margin %.3e vs slack %.3e", passed, total, balance.gronwall.margin,
                   balance.gronwall.slack);
  return out;
}

struct ChannelRuns {
  Outcome outcome;
  SweepResult navier;
  SweepResult no_slip;
};

// 7. Kato mechanism on the channel.
ChannelRuns kato_mechanism(int parallelism) {
  const Timer timer;
  ChannelRuns out;
  for (const char* name : {"channel_navier.json", "channel_noslip.json"}) {
    SweepConfig sc = load_config(config_path(name));
    sc.output_dir.clear();
    sc.parallelism = parallelism;
    (std::string(name) == "channel_navier.json" ? out.navier : out.no_slip) = run_sweep(sc);
  }
  const double seconds = timer.seconds();
  const std::vector<double> k = column(out.navier, "K"), e = column(out.navier, "Erel_T");
  const std::vector<double> kg = column(out.no_slip, "K_grad"), kn = column(out.no_slip, "K");
  const bool complete = k.size() == kEpsilons.size() && e.size() == kEpsilons.size() && kg.size() == kEpsilons.size();
  const double k_slope = complete ? fit_slope(kEpsilons, k) : NAN;
  const double grad_slope = complete ? fit_slope(kEpsilons, kg) : NAN;
  const bool navier_ok = complete && strictly_decreasing(k) && k_slope > 0.0 && strictly_decreasing(e);
  const bool positive = complete && std::all_of(kg.begin(), kg.end(), [](double v) { return v > 0.0; });
  const bool noslip_ok = positive && grad_slope <= kNoSlipGradSlopeMax;
  out.outcome.pass = navier_ok && noslip_ok && seconds <= kChannelSeconds;
  out.outcome.detail =
      fmt("Navier: K = %s (slope %.3f), E_rel(T) = %s -> %s; no-slip: K = %s, eps|grad u|^2 part = %s (slope %.3f, need <= %.2f) -> %s; %.0f s",
          list(k).c_str(), k_slope, list(e).c_str(), navier_ok ? "ok" : "fails", list(kn).c_str(), list(kg).c_str(),
          grad_slope, kNoSlipGradSlopeMax, noslip_ok ? "ok" : "fails", seconds);
  out.outcome.record = sweep_record(out.navier) + sweep_record(out.no_slip);
  return out;
}

// 8. Bardos-Titi pairing by the two routes.
Outcome bardos_titi(const ChannelRuns& channel) {
  std::vector<double> h, gap;
  std::string record;
  for (int n : {64, 128, 256}) {
    RunConfig c;
    c.grid = Grid::make(n, n, 1.0, 1.0, Topology::Channel);
    c.gas.gamma = 1.4;
    c.gas.mu = 1.0;
    c.gas.eta = 1.0;
    c.bc = BcSpec::navier_slip(0.0);
    c.epsilon = 1e-2;
    c.t_final = 0.2;
    c.snapshot_dt = 0.005;
    c.initial = {"channel_wave", {{"b", 0.0}}};
    const Trajectory t = run(c);
    const PairingResult p = bardos_titi_pairing(t, c.gas, channel_cell_pair(1.0, 0.3, 1.0, 1.0), 20.0);
    h.push_back(1.0 / n);
    gap.push_back(std::abs(p.discrepancy()));
    record += exact(p.route_a) + "," + exact(p.route_b) + ";";
  }
  const double slope = fit_slope(h, gap);
  std::vector<double> p;
  for (double v : column(channel.navier, "P")) p.push_back(std::abs(v));
  const bool monotone = p.size() == kEpsilons.size() && strictly_decreasing(p);
  return {slope >= kPairingSlopeMin && monotone,
          fmt("|route a - route b| = %s, slope %.3f (need >= %.1f); Navier |P| = %s, decreasing %s", list(gap).c_str(),
              slope, kPairingSlopeMin, list(p).c_str(), monotone ? "yes" : "no"),
          record};
}

// 9. Fake-layer bounds.
Outcome fake_layer_bounds() {
  const TestPairPtr base = channel_cell_pair(1.0, 0.3, 1.0, 1.0);
  std::vector<double> totals;
  std::string record;
  for (double eps : kEpsilons) {
    const FakeLayer layer(base, eps, 0.5, 1.0);
    const LayerBounds b = measure_layer_bounds(layer, 1.0, {0.0, 0.25, 0.5}, 64, 400);
    totals.push_back(b.total());
    record += exact(b.div) + "," + exact(b.dt) + "," + exact(b.eps_grad) + ";";
  }
  const double lo = *std::min_element(totals.begin(), totals.end());
  const double hi = *std::max_element(totals.begin(), totals.end());
  const double variation = hi / lo - 1.0;
  return {variation < kLayerVariationMax,
          fmt("totals %s, variation %.1f%% (need < %.0f%%)", list(totals, "%.4f").c_str(), 100 * variation,
              100 * kLayerVariationMax),
          record};
}

Trajectory frozen(const Grid& g, double eps, const std::function<Vec2(double, double)>& u) {
  Trajectory t;
  t.config.grid = g;
  t.config.epsilon = eps;
  for (double time : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    Snapshot s;
    s.state = State(g);
    s.state.time = time;
    s.state.epsilon = eps;
    s.state.rho = ScalarField(g, 1.0);
    s.state.mom = fill(g, u);
    for (int i = 0; i < g.nx; ++i) {
      for (Wall w : {Wall::Bottom, Wall::Top}) {
        const Vec2 v = u(g.xc(i), w == Wall::Bottom ? 0.0 : g.Ly);
        (w == Wall::Bottom ? s.wall.x.bottom : s.wall.x.top).push_back(v.x);
        (w == Wall::Bottom ? s.wall.y.bottom : s.wall.y.top).push_back(v.y);
      }
    }
    t.snapshots.push_back(s);
  }
  return t;
}

// 10. CKV bookkeeping.
Outcome ckv_bookkeeping(const ChannelRuns& channel) {
  const Grid g = Grid::make(16, 32, 1.0, 1.0, Topology::Channel);
  const std::vector<std::function<Vec2(double, double)>> nonnegative{
      [](double, double y) { return Vec2{-y, 0.0}; },
      [](double, double y) { return Vec2{std::cos(kPi * y), 0.0}; },
      [](double x, double y) { return Vec2{-y - 0.5 * y * y * (1 - y), 0.1 * std::sin(kPi * y) * std::cos(2 * kPi * x)}; }};
  double zero_worst = 0.0, eps_worst = 0.0;
  std::string record;
  for (double eps : kEpsilons) {
    for (const auto& u : nonnegative)
      for (double m : ckv_margin(frozen(g, eps, u)).margin) zero_worst = std::max(zero_worst, m);
    const CkvResult r = ckv_margin(frozen(g, eps, [](double, double y) { return Vec2{y, 0.0}; }));
    for (double m : r.margin) eps_worst = std::max(eps_worst, std::abs(m - eps) / eps);
    record += exact(r.integral) + ",";
  }
  const std::vector<double> mn = column(channel.navier, "M_int"), ms = column(channel.no_slip, "M_int");
  const bool reported = mn.size() == kEpsilons.size() && ms.size() == kEpsilons.size() &&
                        std::all_of(mn.begin(), mn.end(), [](double v) { return std::isfinite(v) && v >= 0.0; }) &&
                        std::all_of(ms.begin(), ms.end(), [](double v) { return std::isfinite(v) && v >= 0.0; });
  return {zero_worst == 0.0 && eps_worst <= kCkvTol && reported,
          fmt("max M for nonnegative vorticity %.1e, u=(y,0) relative gap %.1e; int M (Navier) = %s; int M (no-slip) = %s",
              zero_worst, eps_worst, list(mn).c_str(), list(ms).c_str()),
          record};
}

struct Pass {
  std::vector<Outcome> outcomes;  // criteria 1 to 10
};

Pass run_all(int parallelism, bool print) {
  Pass pass;
  auto report = [&](int id, const char* name, const Outcome& o, double seconds) {
    if (print) {
      std::printf("criterion %2d %-30s %s  %s  [%.0f s]\n", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str(), seconds);
      std::fflush(stdout);
    }
  };
  auto timed = [&](int id, const char* name, const std::function<Outcome()>& f) {
    const Timer t;
    Outcome o = f();
    report(id, name, o, t.seconds());
    pass.outcomes.push_back(o);
  };
  timed(1, "stress trace lemma", stress_trace_lemma);
  timed(2, "relative entropy algebra", relative_entropy_algebra);
  BalanceRuns balance;
  timed(3, "energy inequality", [&] {
    balance = energy_inequality();
    return balance.outcome;
  });
  timed(4, "remainder reduction", remainder_reduction);
  TorusRuns torus;
  timed(5, "torus inviscid limit", [&] {
    torus = torus_limit(parallelism);
    return torus.outcome;
  });
  timed(6, "gronwall inequality", [&] { return gronwall_inequality(balance, torus); });
  ChannelRuns channel;
  timed(7, "kato mechanism", [&] {
    channel = kato_mechanism(parallelism);
    return channel.outcome;
  });
  timed(8, "bardos-titi pairing", [&] { return bardos_titi(channel); });
  timed(9, "fake-layer bounds", fake_layer_bounds);
  timed(10, "ckv bookkeeping", [&] { return ckv_bookkeeping(channel); });
  return pass;
}

}  // namespace

int main() {
  std::printf("acceptance: tolerances pinned in code; sweep eps = %s\n", list(kEpsilons, "%.0e").c_str());
  std::fflush(stdout);
  const Pass first = run_all(1, true);
  int failures = 0;
  for (const Outcome& o : first.outcomes) failures += o.pass ? 0 : 1;

  const Timer timer;
  const int max_parallel = static_cast<int>(kEpsilons.size());
  const Pass second = run_all(max_parallel, false);
  int identical = 0;
  std::string differing;
  for (std::size_t k = 0; k < first.outcomes.size(); ++k) {
    if (first.outcomes[k].record == second.outcomes[k].record) {
      ++identical;
    } else {
      differing += " " + std::to_string(k + 1);
    }
  }
  const bool deterministic = identical == static_cast<int>(first.outcomes.size());
  std::printf("criterion 11 %-30s %s  %d of %zu criteria reproduce byte-identical outputs on a rerun with sweep parallelism %d%s  [%.0f s]\n",
              "determinism", deterministic ? "PASS" : "FAIL", identical, first.outcomes.size(), max_parallel,
              deterministic ? "" : ("; differing:" + differing).c_str(), timer.seconds());
  failures += deterministic ? 0 : 1;
  std::printf("acceptance: %d of 11 criteria pass\n", 11 - failures);
  return failures == 0 ? 0 : 1;
}
