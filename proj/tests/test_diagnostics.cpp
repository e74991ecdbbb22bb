#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cnse/diagnostics.hpp"
#include "test_support.hpp"

using namespace cnse;
using namespace cnse::testing;

namespace {

GasModel gas(double gamma = 2.0) {
  GasModel m;
  m.a0 = 1.0;
  m.gamma = gamma;
  m.mu = 1.0;
  m.eta = 1.0;
  return m;
}

State make_state(const Grid& g, const std::function<double(double, double)>& rho,
                 const std::function<Vec2(double, double)>& u, double time = 0.0,
                 double epsilon = 0.0) {
  State s(g);
  s.rho = fill(g, rho);
  const VectorField v = fill(g, u);
  for (std::size_t k = 0; k < g.size(); ++k) s.mom.set(k, {s.rho[k] * v.x[k], s.rho[k] * v.y[k]});
  s.time = time;
  s.epsilon = epsilon;
  return s;
}

VectorWallValues wall_values(const Grid& g, const std::function<Vec2(double, double)>& u) {
  VectorWallValues w;
  for (int i = 0; i < g.nx; ++i) {
    const Vec2 b = u(g.xc(i), 0.0), t = u(g.xc(i), g.Ly);
    w.x.bottom.push_back(b.x);
    w.x.top.push_back(t.x);
    w.y.bottom.push_back(b.y);
    w.y.top.push_back(t.y);
  }
  return w;
}

/// Frozen state repeated at the given times.
Trajectory frozen(const Grid& g, const GasModel& m, double eps,
                  const std::function<double(double, double)>& rho,
                  const std::function<Vec2(double, double)>& u, const std::vector<double>& times) {
  Trajectory t;
  t.config.grid = g;
  t.config.gas = m;
  t.config.epsilon = eps;
  for (double time : times) {
    Snapshot s;
    s.state = make_state(g, rho, u, time, eps);
    if (g.has_walls()) s.wall = wall_values(g, u);
    t.snapshots.push_back(s);
  }
  return t;
}

TestPairPtr rest_pair(double r0 = 1.0) {
  Profile p;
  p.amplitude = 0.0;
  return std::make_shared<ShearPair>(p, r0);
}

}  // namespace

TEST_CASE("relative energy examples") {
  const Grid g = Grid::make(16, 16, 1.0, 1.0, Topology::Torus);
  const GasModel m = gas();
  const auto pair = fourier_pair({}, 1.0, 1.0);
  const PairSample ps = pair->sample(g, m, 0.2);
  State same(g);
  same.rho = ps.r;
  for (std::size_t k = 0; k < g.size(); ++k) same.mom.set(k, {ps.r[k] * ps.w.x[k], ps.r[k] * ps.w.y[k]});
  CHECK(std::abs(relative_energy(same, m, ps)) <= 1e-15);

  const PairSample rest = rest_pair()->sample(g, m, 0.0);
  const State shifted = make_state(g, [](double, double) { return 1.0; },
                                   [](double, double) { return Vec2{0.3, 0.0}; });
  CHECK(relative_energy(shifted, m, rest) == doctest::Approx(0.045).epsilon(1e-14));
  const State dense = make_state(g, [](double, double) { return 2.0; },
                                 [](double, double) { return Vec2{}; });
  CHECK(relative_energy(dense, m, rest) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("relative energy against the rest pair is the shifted total energy") {
  const Grid g = Grid::make(24, 16, 2.0, 1.0, Topology::Channel);
  const GasModel m = gas(1.4);
  const State s = make_state(
      g, [](double x, double y) { return 1.0 + 0.3 * std::sin(kPi * x) * std::cos(2 * kPi * y); },
      [](double x, double y) { return Vec2{std::sin(kPi * y), 0.2 * std::cos(kPi * x)}; });
  const PairSample rest = rest_pair()->sample(g, m, 0.0);
  const double area = g.Lx * g.Ly;
  const double expected = energy_total(s, m) - area * h_energy(m, 1.0) -
                          h_prime(m, 1.0) * (total_mass(s) - area);
  CHECK(relative_energy(s, m, rest) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(relative_energy(s, m, rest) > 0.0);
}

TEST_CASE("remainder vanishes for the exact steady pair") {
  const Grid g = Grid::make(16, 32, 1.0, 1.0, Topology::Channel);
  const GasModel m = gas();
  Profile p;
  const ShearPair pair(p, 1.0);
  const PairSample ps = pair.sample(g, m, 0.0);
  const auto w = [](double, double y) { return Vec2{std::sin(kPi * y), 0.0}; };
  const State s = make_state(g, [](double, double) { return 1.0; }, w);
  CHECK(std::abs(remainder_full(s, wall_values(g, w), m, BcSpec::navier_slip(0.0), ps)) <= 1e-13);
}

TEST_CASE("full and reduced remainders agree on random smooth fields") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(-0.4, 0.4);
  FourierPairParams fp;
  fp.k1 = 1;
  fp.k2 = 1;
  fp.l1 = 2;
  fp.l2 = 1;
  const auto torus_pair = fourier_pair(fp, 1.0, 1.0);
  const auto channel_pair = channel_cell_pair(1.0, 0.3, 1.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    const double a = coef(rng), b = coef(rng), c = coef(rng), d = coef(rng);
    const bool channel = trial % 2 == 1;
    const Grid g = Grid::make(32, 32, 1.0, 1.0, channel ? Topology::Channel : Topology::Torus);
    const GasModel m = gas(1.4 + 0.1 * trial);
    const auto rho = [&](double x, double y) {
      return 1.0 + a * std::sin(2 * kPi * x + b) * std::cos(kPi * y);
    };
    const auto u = [&](double x, double y) {
      const double vy = channel ? std::sin(kPi * y) : std::cos(2 * kPi * y);
      return Vec2{c + d * std::cos(2 * kPi * y + a), b * std::sin(2 * kPi * x) * vy};
    };
    const State s = make_state(g, rho, u, 0.3, 0.01 * (trial + 1));
    const VectorWallValues wall = channel ? wall_values(g, u) : VectorWallValues{};
    const BcSpec bc = channel ? BcSpec::navier_slip(0.5) : BcSpec::none();
    const PairSample ps = (channel ? channel_pair : torus_pair)->sample(g, m, 0.3);
    const double full = remainder_full(s, wall, m, bc, ps);
    const ReducedRemainder red = remainder_reduced(s, wall, m, bc, ps);
    CHECK(std::abs(full - red.total()) <= 1e-8 * (1.0 + std::abs(full)));
  }
}

TEST_CASE("remainder with a constant rest pair vanishes") {
  const Grid g = Grid::make(16, 16, 1.0, 1.0, Topology::Channel);
  const GasModel m = gas();
  const auto u = [](double x, double y) { return Vec2{std::cos(kPi * y) + x, 0.1 * std::sin(kPi * y)}; };
  const State s = make_state(g, [](double x, double) { return 1.0 + 0.5 * x; }, u, 0.0, 0.3);
  const PairSample rest = rest_pair(1.7)->sample(g, m, 0.0);
  CHECK(std::abs(remainder_full(s, wall_values(g, u), m, BcSpec::navier_slip(2.0), rest)) <= 1e-14);
}

TEST_CASE("gronwall bound examples") {
  GronwallInput in;
  in.time = {0.0, 0.5, 1.0};
  in.e_rel = {0.0, 0.0, 0.0};
  in.div_w_inf = {0.0, 0.0, 0.0};
  in.forcing = {0.0, 0.0, 0.0};
  in.c0 = 2.0;
  GronwallResult r = gronwall_check(in);
  CHECK(r.pass);
  CHECK(r.margin == 0.0);

  in.e_rel = {1.0, 0.9, 0.8};
  r = gronwall_check(in);
  CHECK(r.pass);
  for (double b : r.bound) CHECK(b == 1.0);
  CHECK(r.margin == doctest::Approx(0.0));

  in.e_rel = {1.0, 1.2, 1.0};
  r = gronwall_check(in);
  CHECK(r.margin == doctest::Approx(0.2));
  CHECK(r.slack == doctest::Approx(0.05));
  CHECK_FALSE(r.pass);

  // Constant rate a and forcing f: E0 e^{at} + f (e^{at} - 1) / a.
  in.time.clear();
  in.e_rel.clear();
  in.div_w_inf.clear();
  in.forcing.clear();
  for (int k = 0; k <= 2000; ++k) {
    in.time.push_back(k / 2000.0);
    in.e_rel.push_back(0.5);
    in.div_w_inf.push_back(0.25);
    in.forcing.push_back(0.3);
  }
  r = gronwall_check(in);
  const double a = 0.5;
  CHECK(r.bound.back() == doctest::Approx(0.5 * std::exp(a) + 0.3 * (std::exp(a) - 1) / a).epsilon(1e-6));
  in.stretch.assign(in.time.size(), 0.5);
  r = gronwall_check(in);
  CHECK(r.bound.back() == doctest::Approx(0.5 * std::exp(1.0) + 0.3 * (std::exp(1.0) - 1)).epsilon(1e-6));
  in.stretch.pop_back();
  CHECK_THROWS_AS(gronwall_check(in), std::invalid_argument);
}

TEST_CASE("kato integral of frozen fields") {
  const GasModel m = gas();
  const double eps = 1.0 / 16.0, T = 0.5;
  const Grid g = Grid::make(8, 64, 1.0, 1.0, Topology::Channel);
  const std::vector<double> times{0.0, 0.25, 0.5};
  const Trajectory shear = frozen(g, m, eps, [](double, double) { return 1.0; },
                                  [](double, double y) { return Vec2{y, 0.0}; }, times);
  const KatoResult ks = kato_integral(shear, m, eps, eps);
  CHECK(ks.integral.grad == doctest::Approx(2 * eps * eps * T).epsilon(1e-12));

  const Trajectory still = frozen(g, m, eps, [](double, double) { return 1.0; },
                                  [](double, double) { return Vec2{}; }, times);
  const KatoResult kr = kato_integral(still, m, eps, eps);
  CHECK(kr.integral.h == doctest::Approx(2 * eps * T).epsilon(1e-12));
  CHECK(kr.integral.u == 0.0);
  CHECK(kr.integral.grad == 0.0);

  CHECK_THROWS_AS(kato_integral(frozen(Grid::make(8, 8, 1, 1, Topology::Torus), m, eps,
                                       [](double, double) { return 1.0; },
                                       [](double, double) { return Vec2{}; }, times),
                                m, eps, eps),
                  DomainError);
}

TEST_CASE("kato velocity term matches fine quadrature") {
  const GasModel m = gas();
  const double eps = 1.0 / 8.0;
  const int ny = 64;
  const Grid g = Grid::make(8, ny, 1.0, 1.0, Topology::Channel);
  const auto u = [](double, double y) { return Vec2{std::sin(kPi * y), 0.0}; };
  const State s = make_state(g, [](double, double) { return 1.0; }, u);
  const KatoComponents k = kato_integrand(s, wall_values(g, u), m, eps, eps);
  // Midpoint sum over the strip cells of eps sin^2(pi y) / min(y, 1 - y)^2.
  double oracle = 0.0;
  const double hy = 1.0 / ny;
  for (int j = 0; j < ny; ++j) {
    const double y = (j + 0.5) * hy;
    const double d = std::min(y, 1.0 - y);
    if (d <= eps) oracle += eps * std::pow(std::sin(kPi * y), 2) / (d * d) * hy;
  }
  CHECK(k.u == doctest::Approx(oracle).epsilon(1e-12));
  // The continuum strip integral differs from the midpoint sum by O(hy^2).
  double fine = 0.0;
  const int n = 200000;
  for (int q = 0; q < n; ++q) {
    const double y = (q + 0.5) * eps / n;
    fine += 2.0 * eps * std::pow(std::sin(kPi * y), 2) / (y * y) * eps / n;
  }
  CHECK(k.u == doctest::Approx(fine).epsilon(1e-2));
}

TEST_CASE("kato components are additive over time intervals") {
  RunConfig c;
  c.grid = Grid::make(16, 32, 1.0, 1.0, Topology::Channel);
  c.gas = gas(1.4);
  c.epsilon = 0.05;
  c.bc = BcSpec::no_slip();
  c.t_final = 0.2;
  c.snapshot_dt = 0.05;
  c.initial = {"shear", {{"mode", 0.0}}};
  const Trajectory t = run(c);
  const KatoResult all = kato_integral(t, c.gas, c.epsilon, c.epsilon);
  const KatoResult a = kato_integral(t, c.gas, c.epsilon, c.epsilon, 0.0, 0.1);
  const KatoResult b = kato_integral(t, c.gas, c.epsilon, c.epsilon, 0.1, 0.2);
  CHECK(a.integral.h + b.integral.h == doctest::Approx(all.integral.h).epsilon(1e-14));
  CHECK(a.integral.u + b.integral.u == doctest::Approx(all.integral.u).epsilon(1e-14));
  CHECK(a.integral.grad + b.integral.grad == doctest::Approx(all.integral.grad).epsilon(1e-14));
  for (const KatoComponents& k : all.integrand) {
    CHECK(k.h >= 0.0);
    CHECK(k.u >= 0.0);
    CHECK(k.grad >= 0.0);
  }
}

TEST_CASE("pairing of a fluid at rest vanishes by both routes") {
  const GasModel m = gas();
  const Grid g = Grid::make(16, 64, 1.0, 1.0, Topology::Channel);
  Trajectory t = frozen(g, m, 0.05, [](double, double) { return 1.0; },
                        [](double, double) { return Vec2{}; }, {0.0, 0.1, 0.2});
  const PairingResult p = bardos_titi_pairing(t, m, channel_cell_pair(1.0, 0.3, 1.0, 1.0), 2.0);
  CHECK(p.route_a == 0.0);
  CHECK(std::abs(p.route_b) <= 1e-14);
  t.config.grid = Grid::make(8, 8, 1, 1, Topology::Torus);
  t.snapshots = frozen(t.config.grid, m, 0.05, [](double, double) { return 1.0; },
                       [](double, double) { return Vec2{}; }, {0.0})
                    .snapshots;
  CHECK_THROWS_AS(bardos_titi_pairing(t, m, channel_cell_pair(1.0, 0.3, 1.0, 1.0), 2.0), DomainError);
}

TEST_CASE("free-slip run has no wall-stress pairing") {
  RunConfig c;
  c.grid = Grid::make(16, 32, 1.0, 1.0, Topology::Channel);
  c.gas = gas(1.4);
  c.epsilon = 0.05;
  c.bc = BcSpec::navier_slip(0.0);
  c.t_final = 0.1;
  c.snapshot_dt = 0.05;
  c.initial = {"channel_wave", {{"b", 0.0}}};
  const Trajectory t = run(c);
  const PairingResult p = bardos_titi_pairing(t, c.gas, channel_cell_pair(1.0, 0.3, 1.0, 1.0), 0.0);
  CHECK(std::abs(p.route_a) <= 1e-12);
  CHECK(p.route_b == 0.0);
}

TEST_CASE("CKV margin sign bookkeeping") {
  const GasModel m = gas();
  const Grid g = Grid::make(8, 16, 1.0, 1.0, Topology::Channel);
  const double eps = 0.01;
  const std::vector<double> times{0.0, 0.5, 1.0};
  const auto one = [](double, double) { return 1.0; };
  const Trajectory pos = frozen(g, m, eps, one, [](double, double y) { return Vec2{-y, 0.0}; }, times);
  CkvResult r = ckv_margin(pos);
  for (double v : r.margin) CHECK(v == 0.0);
  CHECK(r.integral == 0.0);

  const Trajectory neg = frozen(g, m, eps, one, [](double, double y) { return Vec2{y, 0.0}; }, times);
  const VectorField u = fill(g, [](double, double y) { return Vec2{y, 0.0}; });
  CHECK(curl2d(u)[g.index(3, 0)] == doctest::Approx(-1.0));
  r = ckv_margin(neg);
  for (double v : r.margin) CHECK(v == doctest::Approx(eps).epsilon(1e-12));
  CHECK(r.integral == doctest::Approx(eps).epsilon(1e-12));

  Profile p;
  const ShearPair sine(p, 1.0);
  CHECK(ckv_margin(neg, &sine).reference_tangent_nonnegative);
  Profile back;
  back.kind = Profile::Kind::Linear;
  back.amplitude = -1.0;
  back.offset = -1.0;
  const ShearPair against(back, 1.0);
  CHECK_FALSE(ckv_margin(neg, &against).reference_tangent_nonnegative);
}

TEST_CASE("criteria report of a fluid at rest") {
  RunConfig c;
  c.grid = Grid::make(8, 8, 1.0, 1.0, Topology::Torus);
  c.gas = gas();
  c.epsilon = 0.01;
  c.t_final = 0.2;
  c.snapshot_dt = 0.1;
  c.initial = {"rest", {}};
  const Trajectory t = run(c);
  const CriteriaReport rep = criteria_report(t, *rest_pair());
  REQUIRE(rep.rows.size() == 3);
  for (const ReportRow& r : rep.rows) {
    CHECK(r.energy == doctest::Approx(rep.rows.front().energy).epsilon(1e-15));
    CHECK(r.dissipation == 0.0);
    CHECK(r.boundary_dissipation == 0.0);
    CHECK(r.e_rel == 0.0);
    CHECK(r.remainder == 0.0);
    CHECK(r.kato.total() == 0.0);
    CHECK(r.pairing_increment == 0.0);
    CHECK(r.ckv == 0.0);
  }
  CHECK(rep.e_rel_final == 0.0);
  CHECK(rep.gronwall.pass);
  CHECK(rep.max_abs_balance_residual <= 1e-14);
}

TEST_CASE("criteria report fields satisfy their invariants") {
  RunConfig c;
  c.grid = Grid::make(16, 32, 1.0, 1.0, Topology::Channel);
  c.gas = gas(1.4);
  c.epsilon = 0.02;
  c.bc = BcSpec::navier_slip(0.02);
  c.t_final = 0.1;
  c.snapshot_dt = 0.05;
  c.initial = {"shear", {{"mode", 1.0}}};
  const Trajectory t = run(c);
  Profile p;
  p.kind = Profile::Kind::Cos;
  const CriteriaReport rep = criteria_report(t, ShearPair(p, 1.0));
  for (const ReportRow& r : rep.rows) {
    CHECK(r.e_rel >= 0.0);
    CHECK(r.dissipation >= 0.0);
    CHECK(r.boundary_dissipation >= 0.0);
    CHECK(r.kato.h >= 0.0);
    CHECK(r.kato.u >= 0.0);
    CHECK(r.kato.grad >= 0.0);
    CHECK(r.ckv >= 0.0);
  }
  CHECK(rep.ckv_integral >= 0.0);
  CHECK(rep.c0 == doctest::Approx(1.4));
  CHECK(rep.C0 > 0.0);
  REQUIRE(rep.theta0_hat.has_value());
  CHECK(*rep.theta0_hat > 0.0);
  CHECK(rep.gronwall.pass);
  CHECK(rep.e_rel_final == rep.rows.back().e_rel);
  const std::string csv = report_csv(rep);
  CHECK(csv.rfind(std::string(kReportHeader) + "\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(rep.rows.size()) + 1);
}

TEST_CASE("criteria report rejects a pair crossing the walls") {
  RunConfig c;
  c.grid = Grid::make(8, 8, 1.0, 1.0, Topology::Channel);
  c.bc = BcSpec::navier_slip(0.0);
  c.t_final = 0.0;
  const Trajectory t = run(c);
  const ManufacturedPair crossing("crossing", [](double, double, double) { return 1.0; },
                                  [](double, double, double) { return Vec2{0.0, 1.0}; });
  CHECK_THROWS_AS(criteria_report(t, crossing), DomainError);
}

TEST_CASE("golden report is reproduced bit for bit") {
  RunConfig c;
  c.grid = Grid::make(16, 16, 1.0, 1.0, Topology::Channel);
  c.gas = gas(1.4);
  c.gas.mu = 0.5;
  c.gas.eta = 0.5;
  c.epsilon = 0.01;
  c.bc = BcSpec::navier_slip(0.01);
  c.t_final = 0.2;
  c.snapshot_dt = 0.05;
  c.initial = {"channel_wave", {}};
  const Trajectory t = run(c);
  const std::string csv = report_csv(criteria_report(t, *channel_cell_pair(1.0, 0.3, 1.0, 1.0)));
  const std::filesystem::path golden = std::filesystem::path(CNSE_TEST_DATA_DIR) / "golden_report.csv";
  if (std::getenv("CNSE_WRITE_GOLDEN")) {
    std::ofstream(golden, std::ios::binary) << csv;
  }
  std::ifstream in(golden, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream expected;
  expected << in.rdbuf();
  CHECK(csv == expected.str());
}
