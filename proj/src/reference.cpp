#include "cnse/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cnse {

namespace {

constexpr double kPi = std::numbers::pi;

double spectral_radius_sym(const Mat2& g) {
  const double a = g.xx;
  const double d = g.yy;
  const double b = 0.5 * (g.xy + g.yx);
  const double mean = 0.5 * (a + d);
  const double rad = std::hypot(0.5 * (a - d), b);
  return std::max(std::abs(mean + rad), std::abs(mean - rad));
}

// Derivative at t of the quadratic through (ta, fa), (tb, fb), (tc, fc), as weights.
std::array<double, 3> lagrange_derivative(double t, double ta, double tb, double tc) {
  return {((t - tb) + (t - tc)) / ((ta - tb) * (ta - tc)),
          ((t - ta) + (t - tc)) / ((tb - ta) * (tb - tc)),
          ((t - ta) + (t - tb)) / ((tc - ta) * (tc - tb))};
}

}  // namespace

Vec2 euler_residual(const GasModel& model, const PairPoint& p) {
  const Vec2 adv = p.grad_w.apply(p.w);
  const double h2 = h_second(model, p.r);
  return {p.w_t.x + adv.x + h2 * p.grad_r.x, p.w_t.y + adv.y + h2 * p.grad_r.y};
}

double mass_residual(const PairPoint& p) {
  return p.r_t + dot(p.grad_r, p.w) + p.r * p.grad_w.trace();
}

PairSample TestPair::sample(const Grid& grid, const GasModel& model, double t) const {
  PairSample s;
  s.time = t;
  s.r = ScalarField(grid);
  s.r_t = ScalarField(grid);
  s.grad_r = VectorField(grid);
  s.w = VectorField(grid);
  s.w_t = VectorField(grid);
  s.grad_w = TensorField(grid);
  s.residual = VectorField(grid);
  s.mass_residual = ScalarField(grid);
  s.r_min = kInfinity;
  s.r_max = -kInfinity;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const std::size_t k = grid.index(i, j);
      const PairPoint p = eval(grid.xc(i), grid.yc(j), t);
      if (!(p.r > 0.0)) throw DomainError("test pair '" + name() + "': r <= 0");
      s.r[k] = p.r;
      s.r_t[k] = p.r_t;
      s.grad_r.set(k, p.grad_r);
      s.w.set(k, p.w);
      s.w_t.set(k, p.w_t);
      s.grad_w.set(k, p.grad_w);
      s.residual.set(k, euler_residual(model, p));
      s.mass_residual[k] = mass_residual(p);
      s.div_w_inf = std::max(s.div_w_inf, std::abs(p.grad_w.trace()));
      s.sym_grad_w_inf = std::max(s.sym_grad_w_inf, spectral_radius_sym(p.grad_w));
      s.r_min = std::min(s.r_min, p.r);
      s.r_max = std::max(s.r_max, p.r);
    }
  }
  if (grid.has_walls()) {
    for (Wall w : {Wall::Bottom, Wall::Top}) {
      const double y = w == Wall::Bottom ? 0.0 : grid.Ly;
      std::vector<double> wx(grid.nx), wy(grid.nx);
      for (int i = 0; i < grid.nx; ++i) {
        const PairPoint p = eval(grid.xc(i), y, t);
        wx[i] = p.w.x;
        wy[i] = p.w.y;
        s.wall_normal_max = std::max(s.wall_normal_max, std::abs(dot(p.w, wall_normal(w))));
      }
      (w == Wall::Bottom ? s.w_wall.x.bottom : s.w_wall.x.top) = std::move(wx);
      (w == Wall::Bottom ? s.w_wall.y.bottom : s.w_wall.y.top) = std::move(wy);
    }
  }
  return s;
}

double Profile::value(double y) const {
  switch (kind) {
    case Kind::Sin:
      return offset + amplitude * std::sin(k * kPi * y / Ly);
    case Kind::Cos:
      return offset + amplitude * std::cos(k * kPi * y / Ly);
    case Kind::Linear:
      return offset + amplitude * y;
  }
  return 0.0;
}

double Profile::derivative(double y) const {
  const double kk = k * kPi / Ly;
  switch (kind) {
    case Kind::Sin:
      return amplitude * kk * std::cos(kk * y);
    case Kind::Cos:
      return -amplitude * kk * std::sin(kk * y);
    case Kind::Linear:
      return amplitude;
  }
  return 0.0;
}

ShearPair::ShearPair(Profile profile, double r0) : profile_(profile), r0_(r0) {
  if (!(r0 > 0.0)) throw DomainError("shear pair: r0 must be > 0");
}

PairPoint ShearPair::eval(double, double y, double) const {
  PairPoint p;
  p.r = r0_;
  p.w = {profile_.value(y), 0.0};
  p.grad_w.xy = profile_.derivative(y);
  return p;
}

ManufacturedPair::ManufacturedPair(std::string name, ScalarFn r, VectorFn w, ExactFn exact,
                                   double fd_step)
    : name_(std::move(name)),
      r_(std::move(r)),
      w_(std::move(w)),
      exact_(std::move(exact)),
      fd_step_(fd_step) {
  if (!(fd_step > 0.0)) throw DomainError("manufactured pair: finite-difference step must be > 0");
}

PairPoint ManufacturedPair::eval(double x, double y, double t) const {
  if (exact_) return exact_(x, y, t);
  return eval_finite_difference(x, y, t);
}

PairPoint ManufacturedPair::eval_finite_difference(double x, double y, double t) const {
  const double h = fd_step_;
  static constexpr double c[3] = {45.0, -9.0, 1.0};
  auto d_scalar = [&](auto&& f) {
    double acc = 0.0;
    for (int m = 1; m <= 3; ++m) acc += c[m - 1] * (f(m * h) - f(-m * h));
    return acc / (60.0 * h);
  };
  PairPoint p;
  p.r = r_(x, y, t);
  p.w = w_(x, y, t);
  p.r_t = d_scalar([&](double s) { return r_(x, y, t + s); });
  p.grad_r = {d_scalar([&](double s) { return r_(x + s, y, t); }),
              d_scalar([&](double s) { return r_(x, y + s, t); })};
  p.w_t = {d_scalar([&](double s) { return w_(x, y, t + s).x; }),
           d_scalar([&](double s) { return w_(x, y, t + s).y; })};
  p.grad_w.xx = d_scalar([&](double s) { return w_(x + s, y, t).x; });
  p.grad_w.xy = d_scalar([&](double s) { return w_(x, y + s, t).x; });
  p.grad_w.yx = d_scalar([&](double s) { return w_(x + s, y, t).y; });
  p.grad_w.yy = d_scalar([&](double s) { return w_(x, y + s, t).y; });
  return p;
}

std::shared_ptr<ManufacturedPair> oscillating_shear_pair(double amplitude, double Ly) {
  const double k = kPi / Ly;
  auto r = [](double, double, double) { return 1.0; };
  auto w = [=](double, double y, double t) {
    return Vec2{amplitude * std::sin(k * y) * std::cos(t), 0.0};
  };
  auto exact = [=](double, double y, double t) {
    PairPoint p;
    p.w = {amplitude * std::sin(k * y) * std::cos(t), 0.0};
    p.w_t = {-amplitude * std::sin(k * y) * std::sin(t), 0.0};
    p.grad_w.xy = amplitude * k * std::cos(k * y) * std::cos(t);
    return p;
  };
  return std::make_shared<ManufacturedPair>("oscillating_shear", r, w, exact);
}

std::shared_ptr<ManufacturedPair> channel_cell_pair(double A, double B, double Lx, double Ly) {
  const double ky = kPi / Ly;
  const double kx = 2.0 * kPi / Lx;
  auto velocity = [=](double x, double y, double t) {
    const double f = 1.0 + 0.5 * std::sin(t);
    return Vec2{f * (A * std::cos(ky * y) - B * ky * std::sin(kx * x) * std::sin(2.0 * ky * y)),
                f * B * kx * std::cos(kx * x) * std::pow(std::sin(ky * y), 2)};
  };
  auto r = [](double, double, double) { return 1.0; };
  auto exact = [=](double x, double y, double t) {
    const double f = 1.0 + 0.5 * std::sin(t);
    const double df = 0.5 * std::cos(t);
    const double sx = std::sin(kx * x), cx = std::cos(kx * x);
    const double s = std::sin(ky * y), s2 = std::sin(2.0 * ky * y), c2 = std::cos(2.0 * ky * y);
    PairPoint p;
    p.w = velocity(x, y, t);
    p.w_t = {p.w.x * df / f, p.w.y * df / f};
    p.grad_w.xx = -f * B * ky * kx * cx * s2;
    p.grad_w.xy = f * (-A * ky * s - 2.0 * B * ky * ky * sx * c2);
    p.grad_w.yx = -f * B * kx * kx * sx * s * s;
    p.grad_w.yy = f * B * kx * ky * cx * s2;
    return p;
  };
  return std::make_shared<ManufacturedPair>("channel_cell", r, velocity, exact);
}

std::shared_ptr<ManufacturedPair> fourier_pair(const FourierPairParams& q, double Lx, double Ly) {
  const Vec2 k{2.0 * kPi * q.k1 / Lx, 2.0 * kPi * q.k2 / Ly};
  const Vec2 l{2.0 * kPi * q.l1 / Lx, 2.0 * kPi * q.l2 / Ly};
  const double k2 = dot(k, k);
  if (k2 == 0.0) throw DomainError("fourier pair: density wave vector must be nonzero");
  if (!(q.r0 - std::abs(q.a) > 0.0)) throw DomainError("fourier pair: r0 - |a| must be > 0");
  const double c = q.a * q.omega / k2;
  const Vec2 L{-l.y, l.x};
  auto exact = [=](double x, double y, double t) {
    const double theta = k.x * x + k.y * y - q.omega * t + q.phase;
    const double beta = l.x * x + l.y * y + q.phase2;
    const double g = std::cos(q.nu * t);
    const double dg = -q.nu * std::sin(q.nu * t);
    const double st = std::sin(theta), ct = std::cos(theta);
    const double sb = std::sin(beta), cb = std::cos(beta);
    PairPoint p;
    p.r = q.r0 + q.a * st;
    p.r_t = -q.a * q.omega * ct;
    p.grad_r = {q.a * ct * k.x, q.a * ct * k.y};
    const Vec2 F{c * st * k.x + g * q.b * cb * L.x, c * st * k.y + g * q.b * cb * L.y};
    const Vec2 F_t{-c * q.omega * ct * k.x + dg * q.b * cb * L.x,
                   -c * q.omega * ct * k.y + dg * q.b * cb * L.y};
    const Mat2 gF{c * ct * k.x * k.x - g * q.b * sb * L.x * l.x,
                  c * ct * k.x * k.y - g * q.b * sb * L.x * l.y,
                  c * ct * k.y * k.x - g * q.b * sb * L.y * l.x,
                  c * ct * k.y * k.y - g * q.b * sb * L.y * l.y};
    p.w = {F.x / p.r, F.y / p.r};
    p.w_t = {(F_t.x - p.w.x * p.r_t) / p.r, (F_t.y - p.w.y * p.r_t) / p.r};
    p.grad_w = {(gF.xx - p.w.x * p.grad_r.x) / p.r, (gF.xy - p.w.x * p.grad_r.y) / p.r,
                (gF.yx - p.w.y * p.grad_r.x) / p.r, (gF.yy - p.w.y * p.grad_r.y) / p.r};
    return p;
  };
  auto r = [=](double x, double y, double t) { return exact(x, y, t).r; };
  auto w = [=](double x, double y, double t) { return exact(x, y, t).w; };
  return std::make_shared<ManufacturedPair>("fourier", r, w, exact);
}

NumericEulerPair::NumericEulerPair(const Trajectory& euler, double growth_limit) {
  if (euler.snapshots.empty()) throw DomainError("numeric reference: empty trajectory");
  if (euler.config.epsilon != 0.0) throw DomainError("numeric reference: needs an Euler-mode run");
  grid_ = euler.snapshots.front().state.grid();
  const double rho_floor = euler.config.rho_floor;
  double grad0 = 0.0;
  for (const Snapshot& snap : euler.snapshots) {
    Frame f;
    f.time = snap.state.time;
    f.r = snap.state.rho;
    f.w = velocity(snap.state, rho_floor);
    f.grad_r = gradient(f.r);
    VectorWallValues normal_zero;
    if (grid_.has_walls()) {
      normal_zero.y.bottom.assign(grid_.nx, 0.0);
      normal_zero.y.top.assign(grid_.nx, 0.0);
    }
    f.grad_w = gradient(f.w, &normal_zero);
    double gmax = 0.0;
    for (std::size_t k = 0; k < f.grad_w.xx.size(); ++k) {
      const Mat2 m = f.grad_w.at(k);
      gmax = std::max(gmax, std::sqrt(contract(m, m)));
    }
    if (frames_.empty()) grad0 = gmax;
    const double growth = grad0 > 0.0 ? gmax / grad0 : (gmax > 0.0 ? kInfinity : 1.0);
    growth_ = std::max(growth_, growth);
    frames_.push_back(std::move(f));
  }
  if (growth_ > growth_limit)
    throw ReferenceNotSmooth("reference not smooth: gradient grew by a factor " +
                             std::to_string(growth_));
  const std::size_t n = frames_.size();
  for (std::size_t k = 0; k < n; ++k) {
    Frame& f = frames_[k];
    f.r_t = ScalarField(grid_);
    f.w_t = VectorField(grid_);
    if (n < 2) continue;
    std::size_t a, b, c;
    if (n == 2) {
      const double dt = frames_[1].time - frames_[0].time;
      for (std::size_t m = 0; m < f.r.size(); ++m) {
        f.r_t[m] = (frames_[1].r[m] - frames_[0].r[m]) / dt;
        f.w_t.x[m] = (frames_[1].w.x[m] - frames_[0].w.x[m]) / dt;
        f.w_t.y[m] = (frames_[1].w.y[m] - frames_[0].w.y[m]) / dt;
      }
      continue;
    }
    if (k == 0) {
      a = 0, b = 1, c = 2;
    } else if (k == n - 1) {
      a = n - 3, b = n - 2, c = n - 1;
    } else {
      a = k - 1, b = k, c = k + 1;
    }
    const auto wts =
        lagrange_derivative(f.time, frames_[a].time, frames_[b].time, frames_[c].time);
    for (std::size_t m = 0; m < f.r.size(); ++m) {
      f.r_t[m] = wts[0] * frames_[a].r[m] + wts[1] * frames_[b].r[m] + wts[2] * frames_[c].r[m];
      f.w_t.x[m] =
          wts[0] * frames_[a].w.x[m] + wts[1] * frames_[b].w.x[m] + wts[2] * frames_[c].w.x[m];
      f.w_t.y[m] =
          wts[0] * frames_[a].w.y[m] + wts[1] * frames_[b].w.y[m] + wts[2] * frames_[c].w.y[m];
    }
  }
}

PairPoint NumericEulerPair::eval(double x, double y, double t) const {
  // Time bracket.
  std::size_t k0 = 0, k1 = 0;
  double tw = 0.0;
  if (frames_.size() > 1) {
    if (t <= frames_.front().time) {
      k0 = k1 = 0;
    } else if (t >= frames_.back().time) {
      k0 = k1 = frames_.size() - 1;
    } else {
      const auto it = std::upper_bound(frames_.begin(), frames_.end(), t,
                                       [](double v, const Frame& f) { return v < f.time; });
      k1 = static_cast<std::size_t>(it - frames_.begin());
      k0 = k1 - 1;
      const double span = frames_[k1].time - frames_[k0].time;
      tw = (t - frames_[k0].time) / span;
      if (tw == 0.0) k1 = k0;
    }
  }
  // Space stencil: bilinear between cell centres, periodic in x; towards a wall the wall
  // row itself is used as the nearest node, with w . n = 0 there.
  const Grid& g = grid_;
  const double fx = x / g.hx() - 0.5;
  const int i0 = static_cast<int>(std::floor(fx));
  const double ax = fx - i0;
  const int ia = ((i0 % g.nx) + g.nx) % g.nx;
  const int ib = (ia + 1) % g.nx;
  double fy = y / g.hy() - 0.5;
  int j0 = static_cast<int>(std::floor(fy));
  double ay = fy - j0;
  int ja, jb;
  bool wall_node = false;
  if (g.has_walls()) {
    if (fy < 0.0) {
      // Between the wall (fy = -0.5) and row 0.
      ja = jb = 0;
      wall_node = true;
      ay = (fy + 0.5) / 0.5;
    } else if (fy > g.ny - 1) {
      ja = jb = g.ny - 1;
      wall_node = true;
      ay = (g.ny - 0.5 - fy) / 0.5;
    } else {
      ja = j0;
      jb = std::min(j0 + 1, g.ny - 1);
    }
  } else {
    ja = ((j0 % g.ny) + g.ny) % g.ny;
    jb = (ja + 1) % g.ny;
  }
  auto interp = [&](const ScalarField& f, bool normal_component) {
    if (wall_node) {
      const double row = (1.0 - ax) * f(ia, ja) + ax * f(ib, ja);
      return normal_component ? ay * row : row;
    }
    return (1.0 - ax) * (1.0 - ay) * f(ia, ja) + ax * (1.0 - ay) * f(ib, ja) +
           (1.0 - ax) * ay * f(ia, jb) + ax * ay * f(ib, jb);
  };
  auto at_frame = [&](const Frame& f) {
    PairPoint p;
    p.r = interp(f.r, false);
    p.r_t = interp(f.r_t, false);
    p.grad_r = {interp(f.grad_r.x, false), interp(f.grad_r.y, false)};
    p.w = {interp(f.w.x, false), interp(f.w.y, true)};
    p.w_t = {interp(f.w_t.x, false), interp(f.w_t.y, true)};
    p.grad_w = {interp(f.grad_w.xx, false), interp(f.grad_w.xy, false),
                interp(f.grad_w.yx, true), interp(f.grad_w.yy, false)};
    return p;
  };
  const PairPoint p0 = at_frame(frames_[k0]);
  if (k1 == k0) return p0;
  const PairPoint p1 = at_frame(frames_[k1]);
  auto mix = [tw](double a, double b) { return (1.0 - tw) * a + tw * b; };
  PairPoint p;
  p.r = mix(p0.r, p1.r);
  p.r_t = mix(p0.r_t, p1.r_t);
  p.grad_r = {mix(p0.grad_r.x, p1.grad_r.x), mix(p0.grad_r.y, p1.grad_r.y)};
  p.w = {mix(p0.w.x, p1.w.x), mix(p0.w.y, p1.w.y)};
  p.w_t = {mix(p0.w_t.x, p1.w_t.x), mix(p0.w_t.y, p1.w_t.y)};
  p.grad_w = {mix(p0.grad_w.xx, p1.grad_w.xx), mix(p0.grad_w.xy, p1.grad_w.xy),
              mix(p0.grad_w.yx, p1.grad_w.yx), mix(p0.grad_w.yy, p1.grad_w.yy)};
  return p;
}

TestPairPtr euler_numeric_reference(RunConfig config, int refine, double snapshot_dt) {
  if (refine < 1) throw DomainError("numeric reference: refine must be >= 1");
  config.grid.nx *= refine;
  config.grid.ny *= refine;
  config.epsilon = 0.0;
  config.bc = config.grid.has_walls() ? BcSpec::navier_slip(0.0) : BcSpec::none();
  config.snapshot_dt = snapshot_dt;
  const Trajectory traj = run(config);
  return std::make_shared<NumericEulerPair>(traj);
}

double layer_cutoff(double z) {
  if (z <= 0.0) return 1.0;
  if (z >= 1.0) return 0.0;
  return (1.0 - z) * (1.0 - z) * (1.0 + 2.0 * z);
}

double layer_cutoff_derivative(double z) {
  if (z <= 0.0 || z >= 1.0) return 0.0;
  return -6.0 * z * (1.0 - z);
}

FakeLayer::FakeLayer(TestPairPtr base, double epsilon, double c0, double Ly)
    : base_(std::move(base)), epsilon_(epsilon), c0_(c0), Ly_(Ly) {
  if (!base_) throw DomainError("fake layer: missing base pair");
  if (!(epsilon > 0.0)) throw DomainError("fake layer: epsilon must be > 0");
  if (!(c0 > 0.0)) throw DomainError("fake layer: c0 must be > 0");
}

PairPoint FakeLayer::eval(double x, double y, double t) const {
  PairPoint p = base_->eval(x, y, t);
  const double width = c0_ * epsilon_;
  const bool lower = y < 0.5 * Ly_;
  const double d = lower ? y : Ly_ - y;
  const double z = d / width;
  const double chi = layer_cutoff(z);
  const double dchi_dy = layer_cutoff_derivative(z) / width * (lower ? 1.0 : -1.0);
  p.grad_w = {chi * p.grad_w.xx, chi * p.grad_w.xy + p.w.x * dchi_dy, chi * p.grad_w.yx,
              chi * p.grad_w.yy + p.w.y * dchi_dy};
  p.w = {chi * p.w.x, chi * p.w.y};
  p.w_t = {chi * p.w_t.x, chi * p.w_t.y};
  return p;
}

TestPairPtr fake_layer(TestPairPtr base, const Grid& grid, double epsilon, double c0) {
  if (!grid.has_walls()) throw DomainError("fake layer requested on a torus");
  return std::make_shared<FakeLayer>(std::move(base), epsilon, c0, grid.Ly);
}

LayerBounds measure_layer_bounds(const FakeLayer& layer, double Lx, const std::vector<double>& times,
                                 int nx, int ny) {
  if (nx < 1 || ny < 2) throw DomainError("layer bounds: need nx >= 1 and ny >= 2");
  LayerBounds b;
  const double width = std::min(layer.width(), 0.5 * layer.Ly());
  for (double t : times) {
    for (int i = 0; i < nx; ++i) {
      const double x = (i + 0.5) * Lx / nx;
      for (int j = 0; j < ny; ++j) {
        const double d = width * j / (ny - 1);
        for (double y : {d, layer.Ly() - d}) {
          const PairPoint p = layer.eval(x, y, t);
          b.div = std::max(b.div, std::abs(p.grad_w.trace()));
          b.dt = std::max(b.dt, std::hypot(p.w_t.x, p.w_t.y));
          b.eps_grad = std::max(b.eps_grad, layer.epsilon() * std::sqrt(contract(p.grad_w, p.grad_w)));
        }
      }
    }
  }
  return b;
}

}  // namespace cnse
