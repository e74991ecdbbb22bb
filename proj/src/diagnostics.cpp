#include "cnse/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "cnse/summation.hpp"

namespace cnse {

namespace {

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw std::invalid_argument("state and test pair live on different grids");
}

// Wall integral of lambda u . v for the BC wall values u (zero unless Navier slip).
double wall_lambda_pairing(const BcSpec& bc, const Grid& grid, const VectorWallValues& u,
                           const VectorWallValues& v) {
  if (bc.kind != BcSpec::Kind::NavierSlip || bc.lambda == 0.0 || !grid.has_walls()) return 0.0;
  if (u.x.bottom.empty() || v.x.bottom.empty()) return 0.0;
  BoundaryTrace t = BoundaryTrace::zeros(grid);
  for (Wall w : {Wall::Bottom, Wall::Top}) {
    for (int i = 0; i < grid.nx; ++i)
      t.on(w).values[i] =
          bc.lambda * (u.x.on(w)[i] * v.x.on(w)[i] + u.y.on(w)[i] * v.y.on(w)[i]);
  }
  return boundary_integrate(t);
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  CompensatedSum acc;
  for (std::size_t k = 1; k < t.size(); ++k) acc.add(0.5 * (t[k] - t[k - 1]) * (f[k] + f[k - 1]));
  return acc.value();
}

const VectorWallValues* wall_or_null(const Snapshot& s) {
  return s.wall.x.bottom.empty() ? nullptr : &s.wall;
}

}  // namespace

WeakFormResidual weak_form_residual(const Trajectory& trajectory, const TestPair& pair) {
  WeakFormResidual out;
  if (trajectory.snapshots.empty()) return out;
  const RunConfig& cfg = trajectory.config;
  const GasModel& model = cfg.gas;
  const BcSpec& bc = cfg.bc;
  const double eps = cfg.epsilon;
  const Grid& g = trajectory.snapshots.front().state.grid();
  std::vector<double> mass_rate, mom_rate;
  double mass_start = 0.0, mass_end = 0.0, mom_start = 0.0, mom_end = 0.0;
  for (std::size_t n = 0; n < trajectory.snapshots.size(); ++n) {
    const Snapshot& s = trajectory.snapshots[n];
    const PairSample ps = pair.sample(g, model, s.state.time);
    if (g.has_walls() && ps.wall_normal_max > 1e-12)
      throw DomainError("test pair violates w . n = 0 on the walls");
    const VectorField u = velocity(s.state, cfg.rho_floor);
    const VectorWallValues* wall = wall_or_null(s);
    const TensorField grad_u = gradient(u, wall);
    ScalarField fm(g), fp(g), dm(g), dp(g);
    for (std::size_t k = 0; k < fm.size(); ++k) {
      const double rho = s.state.rho[k];
      const Vec2 uk = u.at(k);
      const Vec2 wk = ps.w.at(k);
      const Mat2 gw = ps.grad_w.at(k);
      dm[k] = rho * ps.r[k];
      dp[k] = rho * dot(uk, wk);
      fm[k] = rho * ps.r_t[k] + rho * dot(uk, ps.grad_r.at(k));
      fp[k] = rho * dot(uk, ps.w_t.at(k)) + rho * dot(uk, gw.apply(uk)) +
              pressure(model, rho) * gw.trace() -
              eps * stress_contract(stress(model, grad_u.at(k)), gw);
    }
    double wall_term = 0.0;
    if (g.has_walls() && bc.kind == BcSpec::Kind::NavierSlip) {
      wall_term = -wall_lambda_pairing(bc, g, s.wall, ps.w_wall);
    } else if (g.has_walls() && bc.kind == BcSpec::Kind::NoSlip) {
      BoundaryTrace t = boundary_stress_tangential(model, u, wall);
      for (Wall w : {Wall::Bottom, Wall::Top}) {
        for (int i = 0; i < g.nx; ++i) {
          const Vec2 wv{ps.w_wall.x.on(w)[i], ps.w_wall.y.on(w)[i]};
          t.on(w).values[i] *= eps * dot(wv, wall_tangent(w));
        }
      }
      wall_term = boundary_integrate(t);
    }
    out.time.push_back(s.state.time);
    mass_rate.push_back(integrate(fm));
    mom_rate.push_back(integrate(fp) + wall_term);
    if (n == 0) {
      mass_start = integrate(dm);
      mom_start = integrate(dp);
    }
    if (n + 1 == trajectory.snapshots.size()) {
      mass_end = integrate(dm);
      mom_end = integrate(dp);
    }
  }
  out.mass = (mass_end - mass_start) - trapezoid(out.time, mass_rate);
  out.momentum = (mom_end - mom_start) - trapezoid(out.time, mom_rate);
  return out;
}

double relative_energy(const State& state, const GasModel& model, const PairSample& pair,
                       double rho_floor) {
  require_same_grid(state.grid(), pair.r.grid());
  const VectorField u = velocity(state, rho_floor);
  ScalarField density(state.grid());
  for (std::size_t k = 0; k < density.size(); ++k) {
    const Vec2 d{u.x[k] - pair.w.x[k], u.y[k] - pair.w.y[k]};
    density[k] = 0.5 * state.rho[k] * dot(d, d) + h_relative(model, state.rho[k], pair.r[k]);
  }
  return integrate(density);
}

double remainder_full(const State& state, const VectorWallValues& wall, const GasModel& model,
                      const BcSpec& bc, const PairSample& pair, double rho_floor) {
  require_same_grid(state.grid(), pair.r.grid());
  const Grid& g = state.grid();
  const VectorField u = velocity(state, rho_floor);
  const TensorField grad_u = gradient(u, g.has_walls() ? &wall : nullptr);
  const double eps = state.epsilon;
  ScalarField density(g);
  for (std::size_t k = 0; k < density.size(); ++k) {
    const double rho = state.rho[k];
    const double r = pair.r[k];
    const Vec2 uk = u.at(k);
    const Vec2 wk = pair.w.at(k);
    const Mat2 gw = pair.grad_w.at(k);
    const Vec2 transport = gw.apply(uk);
    const Vec2 material{pair.w_t.x[k] + transport.x, pair.w_t.y[k] + transport.y};
    const Vec2 diff{wk.x - uk.x, wk.y - uk.y};
    const double h2 = h_second(model, r);
    const Vec2 grad_hp{h2 * pair.grad_r.x[k], h2 * pair.grad_r.y[k]};
    const Vec2 flux_diff{r * wk.x - rho * uk.x, r * wk.y - rho * uk.y};
    const double pressure_like =
        rho * (h_prime(model, rho) - h_prime(model, r)) -
        (h_energy(model, rho) - h_energy(model, r) - h_prime(model, r) * (rho - r));
    density[k] = rho * dot(material, diff) +
                 eps * stress_contract(stress(model, grad_u.at(k)), gw) +
                 (r - rho) * h2 * pair.r_t[k] + dot(flux_diff, grad_hp) -
                 pressure_like * gw.trace();
  }
  return integrate(density) + wall_lambda_pairing(bc, g, wall, pair.w_wall);
}

ReducedRemainder remainder_reduced(const State& state, const VectorWallValues& wall,
                                   const GasModel& model, const BcSpec& bc,
                                   const PairSample& pair, double rho_floor) {
  require_same_grid(state.grid(), pair.r.grid());
  const Grid& g = state.grid();
  const VectorField u = velocity(state, rho_floor);
  const TensorField grad_u = gradient(u, g.has_walls() ? &wall : nullptr);
  const double eps = state.epsilon;
  ScalarField forcing(g), viscous(g), bregman(g), stretch(g), mass(g);
  for (std::size_t k = 0; k < forcing.size(); ++k) {
    const double rho = state.rho[k];
    const double r = pair.r[k];
    const Vec2 uk = u.at(k);
    const Vec2 wk = pair.w.at(k);
    const Mat2 gw = pair.grad_w.at(k);
    const Vec2 diff{wk.x - uk.x, wk.y - uk.y};
    forcing[k] = rho * dot(pair.residual.at(k), diff);
    viscous[k] = eps * stress_contract(stress(model, grad_u.at(k)), gw);
    bregman[k] = -(bregman_flux(model, rho, r) - h_relative(model, rho, r)) * gw.trace();
    const Vec2 slip{-diff.x, -diff.y};
    stretch[k] = rho * dot(gw.apply(slip), diff);
    mass[k] = (r - rho) * h_second(model, r) * pair.mass_residual[k];
  }
  ReducedRemainder out;
  out.forcing = integrate(forcing);
  out.viscous = integrate(viscous);
  out.boundary = wall_lambda_pairing(bc, g, wall, pair.w_wall);
  out.bregman = integrate(bregman);
  out.stretch = integrate(stretch);
  out.mass = integrate(mass);
  return out;
}

GronwallResult gronwall_check(const GronwallInput& in) {
  const std::size_t n = in.time.size();
  if (in.e_rel.size() != n || in.div_w_inf.size() != n || in.forcing.size() != n ||
      (!in.stretch.empty() && in.stretch.size() != n))
    throw std::invalid_argument("gronwall_check: series lengths differ");
  GronwallResult out;
  if (n == 0) {
    out.pass = true;
    return out;
  }
  std::vector<double> rate(n);
  for (std::size_t k = 0; k < n; ++k)
    rate[k] = in.c0 * in.div_w_inf[k] + (in.stretch.empty() ? 0.0 : in.stretch[k]);
  std::vector<double> A(n, 0.0);
  for (std::size_t k = 1; k < n; ++k)
    A[k] = A[k - 1] + 0.5 * (in.time[k] - in.time[k - 1]) * (rate[k] + rate[k - 1]);
  out.bound.assign(n, 0.0);
  const double e0 = in.e_rel.front();
  double peak = 0.0;
  CompensatedSum acc;  // int_0^t exp(-A(s)) f(s) ds
  out.margin = -kInfinity;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) {
      acc.add(0.5 * (in.time[k] - in.time[k - 1]) *
              (std::exp(-A[k]) * in.forcing[k] + std::exp(-A[k - 1]) * in.forcing[k - 1]));
    }
    const double forced = std::exp(A[k]) * acc.value();
    peak = std::max(peak, std::abs(forced));
    out.bound[k] = e0 * std::exp(A[k]) + forced;
    out.margin = std::max(out.margin, in.e_rel[k] - out.bound[k]);
  }
  out.slack = in.slack_fraction * (std::abs(e0) + peak);
  out.pass = out.margin <= out.slack;
  return out;
}

KatoComponents kato_integrand(const State& state, const VectorWallValues& wall,
                              const GasModel& model, double epsilon, double strip_width,
                              double rho_floor) {
  const Grid& g = state.grid();
  if (!g.has_walls()) throw DomainError("Kato integral requested on a torus");
  const VectorField u = velocity(state, rho_floor);
  const TensorField grad_u = gradient(u, wall.x.bottom.empty() ? nullptr : &wall);
  const ScalarField d = wall_distance(g);
  ScalarField fh(g), fu(g), fg(g);
  for (std::size_t k = 0; k < fh.size(); ++k) {
    const double rho = state.rho[k];
    const Vec2 uk = u.at(k);
    const Mat2 gu = grad_u.at(k);
    fh[k] = h_energy(model, rho);
    fu[k] = epsilon * rho * dot(uk, uk) / (d[k] * d[k]);
    fg[k] = epsilon * contract(gu, gu);
  }
  const Region strip = Region::strip(strip_width);
  return {integrate(fh, strip), integrate(fu, strip), integrate(fg, strip)};
}

KatoResult kato_integral(const Trajectory& trajectory, const GasModel& model, double epsilon,
                         double strip_width, double t0, double t1) {
  KatoResult out;
  for (const Snapshot& s : trajectory.snapshots) {
    if (s.state.time < t0 || s.state.time > t1) continue;
    out.time.push_back(s.state.time);
    out.integrand.push_back(kato_integrand(s.state, s.wall, model, epsilon, strip_width,
                                           trajectory.config.rho_floor));
  }
  std::vector<double> h, u, gr;
  for (const auto& c : out.integrand) {
    h.push_back(c.h);
    u.push_back(c.u);
    gr.push_back(c.grad);
  }
  out.integral = {trapezoid(out.time, h), trapezoid(out.time, u), trapezoid(out.time, gr)};
  return out;
}

PairingResult bardos_titi_pairing(const Trajectory& trajectory, const GasModel& model,
                                  const TestPairPtr& test_w, double layer_c0) {
  if (trajectory.snapshots.empty()) return {};
  const Grid& g = trajectory.snapshots.front().state.grid();
  if (!g.has_walls()) throw DomainError("boundary-stress pairing requested on a torus");
  const double eps = trajectory.config.epsilon;
  const double rho_floor = trajectory.config.rho_floor;
  PairingResult out;
  std::shared_ptr<const FakeLayer> layer;
  if (eps > 0.0 && layer_c0 > 0.0) layer = std::make_shared<FakeLayer>(test_w, eps, layer_c0, g.Ly);
  double start = 0.0, end = 0.0;
  for (std::size_t n = 0; n < trajectory.snapshots.size(); ++n) {
    const Snapshot& s = trajectory.snapshots[n];
    const double t = s.state.time;
    const VectorField u = velocity(s.state, rho_floor);
    const VectorWallValues* wall = wall_or_null(s);
    const BoundaryTrace trace = boundary_stress_tangential(model, u, wall);
    BoundaryTrace integrand = BoundaryTrace::zeros(g);
    for (Wall w : {Wall::Bottom, Wall::Top}) {
      const double y = w == Wall::Bottom ? 0.0 : g.Ly;
      for (int i = 0; i < g.nx; ++i) {
        const Vec2 wv = test_w->eval(g.xc(i), y, t).w;
        integrand.on(w).values[i] = eps * trace.on(w).values[i] * dot(wv, wall_tangent(w));
      }
    }
    out.time.push_back(t);
    out.wall_integrand.push_back(boundary_integrate(integrand));
    if (!layer) {
      out.volume_integrand.push_back(0.0);
      continue;
    }
    const TensorField grad_u = gradient(u, wall);
    ScalarField vol(g), mom(g);
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t k = g.index(i, j);
        const PairPoint p = layer->eval(g.xc(i), g.yc(j), t);
        const double rho = s.state.rho[k];
        const Vec2 uk = u.at(k);
        vol[k] = rho * dot(uk, p.w_t) + rho * dot(uk, p.grad_w.apply(uk)) +
                 pressure(model, rho) * p.grad_w.trace() -
                 eps * stress_contract(stress(model, grad_u.at(k)), p.grad_w);
        mom[k] = rho * dot(uk, p.w);
      }
    }
    out.volume_integrand.push_back(integrate(vol));
    if (n == 0) start = integrate(mom);
    if (n + 1 == trajectory.snapshots.size()) end = integrate(mom);
  }
  out.route_a = trapezoid(out.time, out.wall_integrand);
  if (layer) out.route_b = (end - start) - trapezoid(out.time, out.volume_integrand);
  return out;
}

CkvResult ckv_margin(const Trajectory& trajectory, const TestPair* reference) {
  CkvResult out;
  const double eps = trajectory.config.epsilon;
  for (const Snapshot& s : trajectory.snapshots) {
    const Grid& g = s.state.grid();
    if (!g.has_walls()) throw DomainError("CKV margin requested on a torus");
    const VectorField u = velocity(s.state, trajectory.config.rho_floor);
    const BoundaryTrace omega = wall_vorticity(u, wall_or_null(s));
    double lowest = kInfinity;
    for (Wall w : {Wall::Bottom, Wall::Top})
      for (double v : omega.on(w).values) lowest = std::min(lowest, eps * v);
    out.time.push_back(s.state.time);
    out.margin.push_back(std::max(0.0, -lowest));
    if (reference) {
      for (Wall w : {Wall::Bottom, Wall::Top}) {
        const double y = w == Wall::Bottom ? 0.0 : g.Ly;
        for (int i = 0; i < g.nx; ++i) {
          const Vec2 wv = reference->eval(g.xc(i), y, s.state.time).w;
          if (dot(wv, wall_tangent(w)) < -1e-10) out.reference_tangent_nonnegative = false;
        }
      }
    }
  }
  out.integral = trapezoid(out.time, out.margin);
  return out;
}

CriteriaReport criteria_report(const Trajectory& trajectory, const TestPair& pair,
                               const ReportOptions& options) {
  CriteriaReport rep;
  rep.floor_activations = trajectory.floor_activations;
  if (trajectory.snapshots.empty()) return rep;
  const RunConfig& cfg = trajectory.config;
  const GasModel& model = cfg.gas;
  const Grid& g = trajectory.snapshots.front().state.grid();
  const double eps = cfg.epsilon;
  const double rho_floor = cfg.rho_floor;
  const bool walls = g.has_walls();

  std::vector<PairSample> samples;
  samples.reserve(trajectory.snapshots.size());
  double r_min = kInfinity, r_max = 0.0, rho_max = 0.0;
  for (const Snapshot& s : trajectory.snapshots) {
    samples.push_back(pair.sample(g, model, s.state.time));
    if (walls && samples.back().wall_normal_max > 1e-12)
      throw DomainError("test pair violates w . n = 0 on the walls");
    r_min = std::min(r_min, samples.back().r_min);
    r_max = std::max(r_max, samples.back().r_max);
    for (std::size_t k = 0; k < s.state.rho.size(); ++k) rho_max = std::max(rho_max, s.state.rho[k]);
  }
  rho_max = std::max(rho_max, r_max) * 1.25 + 1e-12;
  rep.c0 = bregman_coercivity_constant(model, r_min, r_max, rho_max);

  // Wall-stress pairing and CKV margins use the reference w as test function.
  std::shared_ptr<const TestPair> shared(&pair, [](const TestPair*) {});
  PairingResult pairing;
  CkvResult ckv;
  if (walls) {
    pairing = bardos_titi_pairing(trajectory, model, shared,
                                  options.pairing_route_b ? options.layer_c0 : 0.0);
    rep.pairing_a = pairing.route_a;
    rep.pairing_b = pairing.route_b;
    ckv = ckv_margin(trajectory, &pair);
    rep.ckv_integral = ckv.integral;
    rep.reference_tangent_nonnegative = ckv.reference_tangent_nonnegative;
  }

  std::vector<double> times, e_rel, div_w, stretch, grad_w2, base_forcing;
  for (std::size_t n = 0; n < trajectory.snapshots.size(); ++n) {
    const Snapshot& s = trajectory.snapshots[n];
    const PairSample& ps = samples[n];
    const VectorField u = velocity(s.state, rho_floor);
    const VectorWallValues* wall = wall_or_null(s);
    const TensorField grad_u = gradient(u, wall);
    ReportRow row;
    row.time = s.state.time;
    row.energy = energy_total(s.state, model, rho_floor);
    row.dissipation = integrate(dissipation(model, grad_u));
    row.boundary_dissipation = wall_lambda_pairing(cfg.bc, g, s.wall, s.wall);
    row.e_rel = relative_energy(s.state, model, ps, rho_floor);
    row.remainder = remainder_full(s.state, s.wall, model, cfg.bc, ps, rho_floor);
    if (walls) {
      row.kato = kato_integrand(s.state, s.wall, model, eps, options.strip_factor * eps, rho_floor);
      row.pairing_increment = pairing.wall_integrand[n];
      row.ckv = ckv.margin[n];
    }
    rep.rows.push_back(row);

    const Coercivity coer = dissipation_coercivity(model, u, wall);
    if (coer.theta0_hat)
      rep.theta0_hat = rep.theta0_hat ? std::min(*rep.theta0_hat, *coer.theta0_hat) : *coer.theta0_hat;

    const ReducedRemainder red = remainder_reduced(s.state, s.wall, model, cfg.bc, ps, rho_floor);
    ScalarField gw2(g);
    for (std::size_t k = 0; k < gw2.size(); ++k) {
      const Mat2 m = ps.grad_w.at(k);
      gw2[k] = contract(m, m);
    }
    double wall_w2 = 0.0;
    if (cfg.bc.kind == BcSpec::Kind::NavierSlip) {
      wall_w2 = 0.25 * wall_lambda_pairing(cfg.bc, g, ps.w_wall, ps.w_wall);
    }
    times.push_back(row.time);
    e_rel.push_back(row.e_rel);
    div_w.push_back(ps.div_w_inf);
    stretch.push_back(2.0 * ps.sym_grad_w_inf);
    grad_w2.push_back(integrate(gw2));
    base_forcing.push_back(red.forcing + red.mass + wall_w2);
  }

  const double s_norm = model.stress_operator_norm();
  const double theta0 = rep.theta0_hat.value_or(model.mu);
  rep.C0 = s_norm * s_norm / (4.0 * options.split * theta0);
  GronwallInput in;
  in.time = times;
  in.e_rel = e_rel;
  in.div_w_inf = div_w;
  in.c0 = rep.c0;
  in.slack_fraction = options.slack_fraction;
  for (std::size_t n = 0; n < times.size(); ++n)
    in.forcing.push_back(base_forcing[n] + rep.C0 * eps * grad_w2[n]);
  rep.gronwall_div_only = gronwall_check(in);
  in.stretch = stretch;
  rep.gronwall = gronwall_check(in);

  if (walls) {
    std::vector<double> h, uu, gr;
    for (const auto& r : rep.rows) {
      h.push_back(r.kato.h);
      uu.push_back(r.kato.u);
      gr.push_back(r.kato.grad);
    }
    rep.kato = {trapezoid(times, h), trapezoid(times, uu), trapezoid(times, gr)};
  }
  rep.e_rel_final = e_rel.back();
  if (!trajectory.log.empty()) {
    for (const BalancePoint& b : energy_balance_residual(trajectory)) {
      rep.max_balance_residual = std::max(rep.max_balance_residual, b.residual);
      rep.max_abs_balance_residual = std::max(rep.max_abs_balance_residual, std::abs(b.residual));
    }
  }
  return rep;
}

std::string report_csv(const CriteriaReport& report) {
  std::string out = kReportHeader;
  out += '\n';
  char buf[512];
  for (const ReportRow& r : report.rows) {
    std::snprintf(buf, sizeof buf,
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.time,
                  r.energy, r.dissipation, r.boundary_dissipation, r.e_rel, r.remainder, r.kato.h,
                  r.kato.u, r.kato.grad, r.pairing_increment, r.ckv);
    out += buf;
  }
  return out;
}

}  // namespace cnse
