#include "cnse/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cnse/stress.hpp"
#include "cnse/summation.hpp"

namespace cnse {

namespace {

constexpr int kGhost = 2;

double limited_slope(double left, double right, Limiter limiter) {
  switch (limiter) {
    case Limiter::None:
      return 0.5 * (left + right);
    case Limiter::Minmod:
      if (left * right <= 0.0) return 0.0;
      return std::abs(left) < std::abs(right) ? left : right;
    case Limiter::MonotonizedCentral: {
      if (left * right <= 0.0) return 0.0;
      const double c = 0.5 * (left + right);
      const double m = std::min({std::abs(2.0 * left), std::abs(2.0 * right), std::abs(c)});
      return std::copysign(m, c);
    }
  }
  return 0.0;
}

// Primitive variables on a grid padded with two ghost layers on each side.
struct Padded {
  int nx = 0, ny = 0, stride = 0;
  std::vector<double> rho, u, v, p;

  explicit Padded(const Grid& g)
      : nx(g.nx), ny(g.ny), stride(g.nx + 2 * kGhost) {
    const std::size_t n = static_cast<std::size_t>(stride) * (g.ny + 2 * kGhost);
    rho.assign(n, 0.0);
    u.assign(n, 0.0);
    v.assign(n, 0.0);
    p.assign(n, 0.0);
  }
  std::size_t at(int i, int j) const {
    return static_cast<std::size_t>(j + kGhost) * stride + static_cast<std::size_t>(i + kGhost);
  }
};

void fill_primitives(const State& s, const GasModel& model, double rho_floor, Padded& q) {
  const Grid& g = s.grid();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      const std::size_t a = q.at(i, j);
      const double rho = s.rho[k];
      q.rho[a] = rho;
      if (rho > rho_floor) {
        q.u[a] = s.mom.x[k] / rho;
        q.v[a] = s.mom.y[k] / rho;
      } else {
        q.u[a] = 0.0;
        q.v[a] = 0.0;
      }
      q.p[a] = rho > 0.0 ? model.a0 * std::pow(rho, model.gamma) : 0.0;
    }
  }
  auto copy = [&q](std::size_t dst, std::size_t src, double v_sign) {
    q.rho[dst] = q.rho[src];
    q.u[dst] = q.u[src];
    q.v[dst] = v_sign * q.v[src];
    q.p[dst] = q.p[src];
  };
  // x: periodic on both topologies.
  for (int j = 0; j < g.ny; ++j) {
    for (int l = 1; l <= kGhost; ++l) {
      copy(q.at(-l, j), q.at(g.nx - l, j), 1.0);
      copy(q.at(g.nx - 1 + l, j), q.at(l - 1, j), 1.0);
    }
  }
  // y: periodic on the torus, mirror (u.n reversed) at channel walls.
  for (int i = 0; i < g.nx; ++i) {
    for (int l = 1; l <= kGhost; ++l) {
      if (g.has_walls()) {
        copy(q.at(i, -l), q.at(i, l - 1), -1.0);
        copy(q.at(i, g.ny - 1 + l), q.at(i, g.ny - l), -1.0);
      } else {
        copy(q.at(i, -l), q.at(i, g.ny - l), 1.0);
        copy(q.at(i, g.ny - 1 + l), q.at(i, l - 1), 1.0);
      }
    }
  }
}

struct Flux {
  double mass = 0.0, mx = 0.0, my = 0.0;
};

struct FaceState {
  double rho, u, v, p;
};

// Rusanov flux across a face with unit normal along x (normal_x = true) or y.
Flux rusanov(const FaceState& l, const FaceState& r, bool normal_x, double gamma,
             double rho_floor) {
  const double rl = std::max(l.rho, rho_floor);
  const double rr = std::max(r.rho, rho_floor);
  const double unl = normal_x ? l.u : l.v;
  const double unr = normal_x ? r.u : r.v;
  const double cl = std::sqrt(gamma * std::max(l.p, 0.0) / rl);
  const double cr = std::sqrt(gamma * std::max(r.p, 0.0) / rr);
  const double a = std::max(std::abs(unl) + cl, std::abs(unr) + cr);
  Flux f;
  f.mass = 0.5 * (l.rho * unl + r.rho * unr) - 0.5 * a * (r.rho - l.rho);
  f.mx = 0.5 * (l.rho * l.u * unl + r.rho * r.u * unr) - 0.5 * a * (r.rho * r.u - l.rho * l.u);
  f.my = 0.5 * (l.rho * l.v * unl + r.rho * r.v * unr) - 0.5 * a * (r.rho * r.v - l.rho * l.v);
  if (normal_x) {
    f.mx += 0.5 * (l.p + r.p);
  } else {
    f.my += 0.5 * (l.p + r.p);
  }
  return f;
}

double wall_slip_value(double u0, double u1, const GasModel& model, const BcSpec& bc,
                       double epsilon, double h) {
  if (bc.kind == BcSpec::Kind::NoSlip) return 0.0;
  const double visc = epsilon * model.mu;
  const double denom = bc.lambda * h + 8.0 * visc / 3.0;
  if (denom == 0.0) return (9.0 * u0 - u1) / 8.0;  // inviscid, stress-free
  return visc * (3.0 * u0 - u1 / 3.0) / denom;
}

VectorWallValues wall_values_from(const Padded& q, const Grid& g, const GasModel& model,
                                  const BcSpec& bc, double epsilon) {
  VectorWallValues w;
  if (!g.has_walls() || bc.kind == BcSpec::Kind::None) return w;
  const double h = g.hy();
  w.x.bottom.resize(g.nx);
  w.x.top.resize(g.nx);
  w.y.bottom.assign(g.nx, 0.0);
  w.y.top.assign(g.nx, 0.0);
  for (int i = 0; i < g.nx; ++i) {
    w.x.bottom[i] = wall_slip_value(q.u[q.at(i, 0)], q.u[q.at(i, 1)], model, bc, epsilon, h);
    w.x.top[i] =
        wall_slip_value(q.u[q.at(i, g.ny - 1)], q.u[q.at(i, g.ny - 2)], model, bc, epsilon, h);
  }
  return w;
}

struct Rhs {
  std::vector<double> rho, mx, my;
  explicit Rhs(std::size_t n) : rho(n, 0.0), mx(n, 0.0), my(n, 0.0) {}
};

// Limited slopes of the four primitives along one axis, on cells -1..n of the padded grid.
struct Slopes {
  std::vector<double> rho, u, v, p;
};

Slopes slopes_along(const Padded& q, bool along_x, Limiter limiter) {
  Slopes s;
  const std::size_t n = q.rho.size();
  s.rho.assign(n, 0.0);
  s.u.assign(n, 0.0);
  s.v.assign(n, 0.0);
  s.p.assign(n, 0.0);
  const std::ptrdiff_t off = along_x ? 1 : q.stride;
  auto fill = [&](const std::vector<double>& f, std::vector<double>& out, int i0, int i1, int j0,
                  int j1) {
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        const std::size_t a = q.at(i, j);
        out[a] = limited_slope(f[a] - f[a - off], f[a + off] - f[a], limiter);
      }
    }
  };
  const int i0 = along_x ? -1 : 0, i1 = along_x ? q.nx : q.nx - 1;
  const int j0 = along_x ? 0 : -1, j1 = along_x ? q.ny - 1 : q.ny;
  fill(q.rho, s.rho, i0, i1, j0, j1);
  fill(q.u, s.u, i0, i1, j0, j1);
  fill(q.v, s.v, i0, i1, j0, j1);
  fill(q.p, s.p, i0, i1, j0, j1);
  return s;
}

// Reconstructed states on both sides of the face between padded cells a (left) and b (right).
void reconstruct(const Padded& q, const Slopes& s, std::size_t a, std::size_t b, FaceState& left,
                 FaceState& right) {
  left = {q.rho[a] + 0.5 * s.rho[a], q.u[a] + 0.5 * s.u[a], q.v[a] + 0.5 * s.v[a],
          q.p[a] + 0.5 * s.p[a]};
  right = {q.rho[b] - 0.5 * s.rho[b], q.u[b] - 0.5 * s.u[b], q.v[b] - 0.5 * s.v[b],
           q.p[b] - 0.5 * s.p[b]};
}

void convective_rhs(const Padded& q, const Grid& g, const GasModel& model, Limiter limiter,
                    double rho_floor, Rhs& out) {
  const double hx = g.hx();
  const double hy = g.hy();
  const int nx = g.nx;
  const int ny = g.ny;
  FaceState l{}, r{};
  {
    const Slopes sx = slopes_along(q, true, limiter);
    std::vector<Flux> row(static_cast<std::size_t>(nx) + 1);
    // x faces: face i sits between cells i-1 and i.
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i <= nx; ++i) {
        reconstruct(q, sx, q.at(i - 1, j), q.at(i, j), l, r);
        row[i] = rusanov(l, r, true, model.gamma, rho_floor);
      }
      for (int i = 0; i < nx; ++i) {
        const std::size_t k = g.index(i, j);
        out.rho[k] -= (row[i + 1].mass - row[i].mass) / hx;
        out.mx[k] -= (row[i + 1].mx - row[i].mx) / hx;
        out.my[k] -= (row[i + 1].my - row[i].my) / hx;
      }
    }
  }
  // y faces: face j sits between cells j-1 and j; faces 0 and ny are walls on a channel.
  const Slopes sy = slopes_along(q, false, limiter);
  std::vector<Flux> below(nx), above(nx);
  auto face_y = [&](int j, std::vector<Flux>& dst) {
    for (int i = 0; i < nx; ++i) {
      reconstruct(q, sy, q.at(i, j - 1), q.at(i, j), l, r);
      Flux f = rusanov(l, r, false, model.gamma, rho_floor);
      if (g.has_walls() && (j == 0 || j == ny)) {
        f.mass = 0.0;
        f.mx = 0.0;
      }
      dst[i] = f;
    }
  };
  face_y(0, below);
  for (int j = 0; j < ny; ++j) {
    face_y(j + 1, above);
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = g.index(i, j);
      out.rho[k] -= (above[i].mass - below[i].mass) / hy;
      out.mx[k] -= (above[i].mx - below[i].mx) / hy;
      out.my[k] -= (above[i].my - below[i].my) / hy;
    }
    std::swap(below, above);
  }
}

void viscous_rhs(const Padded& q, const Grid& g, const GasModel& model,
                 const VectorWallValues& wall, double epsilon, Rhs& out) {
  if (epsilon == 0.0) return;
  const int nx = g.nx;
  const int ny = g.ny;
  const double hx = g.hx();
  const double hy = g.hy();
  const bool walls = g.has_walls() && !wall.x.bottom.empty();
  // Cell-centred gradients (tangential parts of the face stresses).
  std::vector<double> ux(g.size()), uy(g.size()), vx(g.size()), vy(g.size());
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = g.index(i, j);
      ux[k] = (q.u[q.at(i + 1, j)] - q.u[q.at(i - 1, j)]) / (2.0 * hx);
      vx[k] = (q.v[q.at(i + 1, j)] - q.v[q.at(i - 1, j)]) / (2.0 * hx);
      if (walls && j == 0) {
        uy[k] = (-4.0 / 3.0 * wall.x.bottom[i] + q.u[q.at(i, 0)] + q.u[q.at(i, 1)] / 3.0) / hy;
        vy[k] = (-4.0 / 3.0 * wall.y.bottom[i] + q.v[q.at(i, 0)] + q.v[q.at(i, 1)] / 3.0) / hy;
      } else if (walls && j == ny - 1) {
        uy[k] = (4.0 / 3.0 * wall.x.top[i] - q.u[q.at(i, ny - 1)] - q.u[q.at(i, ny - 2)] / 3.0) /
                hy;
        vy[k] = (4.0 / 3.0 * wall.y.top[i] - q.v[q.at(i, ny - 1)] - q.v[q.at(i, ny - 2)] / 3.0) /
                hy;
      } else {
        uy[k] = (q.u[q.at(i, j + 1)] - q.u[q.at(i, j - 1)]) / (2.0 * hy);
        vy[k] = (q.v[q.at(i, j + 1)] - q.v[q.at(i, j - 1)]) / (2.0 * hy);
      }
    }
  }
  auto wrap = [nx](int i) { return (i + nx) % nx; };
  // x faces.
  std::vector<Stress> row(static_cast<std::size_t>(nx) + 1);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const std::size_t kl = g.index(wrap(i - 1), j);
      const std::size_t kr = g.index(wrap(i), j);
      const Mat2 grad{(q.u[q.at(i, j)] - q.u[q.at(i - 1, j)]) / hx, 0.5 * (uy[kl] + uy[kr]),
                      (q.v[q.at(i, j)] - q.v[q.at(i - 1, j)]) / hx, 0.5 * (vy[kl] + vy[kr])};
      row[i] = stress(model, grad);
    }
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = g.index(i, j);
      out.mx[k] += epsilon * (row[i + 1].xx - row[i].xx) / hx;
      out.my[k] += epsilon * (row[i + 1].xy - row[i].xy) / hx;
    }
  }
  // y faces.
  auto face_y = [&](int j, std::vector<Stress>& dst) {
    for (int i = 0; i < nx; ++i) {
      Mat2 grad;
      if (walls && (j == 0 || j == ny)) {
        const bool bottom = j == 0;
        const auto& wu = bottom ? wall.x.bottom : wall.x.top;
        const auto& wv = bottom ? wall.y.bottom : wall.y.top;
        const int c0 = bottom ? 0 : ny - 1;
        const int c1 = bottom ? 1 : ny - 2;
        const double sgn = bottom ? 1.0 : -1.0;
        grad.xx = (wu[wrap(i + 1)] - wu[wrap(i - 1)]) / (2.0 * hx);
        grad.yx = (wv[wrap(i + 1)] - wv[wrap(i - 1)]) / (2.0 * hx);
        grad.xy = sgn * (-8.0 / 3.0 * wu[i] + 3.0 * q.u[q.at(i, c0)] - q.u[q.at(i, c1)] / 3.0) / hy;
        grad.yy = sgn * (-8.0 / 3.0 * wv[i] + 3.0 * q.v[q.at(i, c0)] - q.v[q.at(i, c1)] / 3.0) / hy;
      } else {
        const int jl = (j - 1 + ny) % ny;
        const int jr = j % ny;
        const std::size_t kl = g.index(i, jl);
        const std::size_t kr = g.index(i, jr);
        grad.xx = 0.5 * (ux[kl] + ux[kr]);
        grad.yx = 0.5 * (vx[kl] + vx[kr]);
        grad.xy = (q.u[q.at(i, j)] - q.u[q.at(i, j - 1)]) / hy;
        grad.yy = (q.v[q.at(i, j)] - q.v[q.at(i, j - 1)]) / hy;
      }
      dst[i] = stress(model, grad);
    }
  };
  std::vector<Stress> below(nx), above(nx);
  face_y(0, below);
  for (int j = 0; j < ny; ++j) {
    face_y(j + 1, above);
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = g.index(i, j);
      out.mx[k] += epsilon * (above[i].xy - below[i].xy) / hy;
      out.my[k] += epsilon * (above[i].yy - below[i].yy) / hy;
    }
    std::swap(below, above);
  }
}

Rhs evaluate_rhs(const State& s, const GasModel& model, const BcSpec& bc, Limiter limiter,
                 double rho_floor) {
  const Grid& g = s.grid();
  Padded q(g);
  fill_primitives(s, model, rho_floor, q);
  Rhs out(g.size());
  convective_rhs(q, g, model, limiter, rho_floor, out);
  if (s.epsilon > 0.0) {
    const VectorWallValues wall = wall_values_from(q, g, model, bc, s.epsilon);
    viscous_rhs(q, g, model, wall, s.epsilon, out);
  }
  return out;
}

int apply_floor(State& s, double rho_floor) {
  int count = 0;
  for (std::size_t k = 0; k < s.rho.size(); ++k) {
    if (s.rho[k] < rho_floor) {
      s.rho[k] = rho_floor;
      s.mom.x[k] = 0.0;
      s.mom.y[k] = 0.0;
      ++count;
    }
  }
  return count;
}

bool all_finite(const State& s) {
  for (std::size_t k = 0; k < s.rho.size(); ++k) {
    if (!std::isfinite(s.rho[k]) || !std::isfinite(s.mom.x[k]) || !std::isfinite(s.mom.y[k]))
      return false;
  }
  return true;
}

}  // namespace

VectorField velocity(const State& state, double rho_floor) {
  VectorField u(state.grid());
  for (std::size_t k = 0; k < state.rho.size(); ++k) {
    const double rho = state.rho[k];
    if (rho > rho_floor) u.set(k, {state.mom.x[k] / rho, state.mom.y[k] / rho});
  }
  return u;
}

BcSpec BcSpec::navier_slip(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw DomainError("Navier slip coefficient must be finite and >= 0");
  return {Kind::NavierSlip, lambda};
}

BcSpec BcSpec::from_slip_law(const SlipLaw& law, double epsilon, Topology topology) {
  if (topology == Topology::Torus) return none();
  if (law.kind == SlipLaw::Kind::NoSlip) return no_slip();
  return navier_slip(law.lambda(epsilon));
}

double BcSpec::effective_lambda() const {
  switch (kind) {
    case Kind::None:
      return 0.0;
    case Kind::NavierSlip:
      return lambda;
    case Kind::NoSlip:
      return kInfinity;
  }
  return 0.0;
}

double InitialData::param(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void RunConfig::validate() const {
  grid.validate();
  gas.validate();
  if (!(epsilon >= 0.0)) throw DomainError("run: epsilon must be >= 0");
  if (!(t_final >= 0.0)) throw DomainError("run: t_final must be >= 0");
  if (!(cfl > 0.0 && cfl <= 0.9)) throw DomainError("run: CFL must lie in (0, 0.9]");
  if (!(rho_floor > 0.0)) throw DomainError("run: rho_floor must be > 0");
  if (grid.has_walls() && bc.kind == BcSpec::Kind::None)
    throw DomainError("run: a channel needs a Navier-slip or no-slip condition");
  if (!grid.has_walls() && bc.kind != BcSpec::Kind::None)
    throw DomainError("run: the torus takes no wall condition");
}

VectorWallValues apply_bc(const State& state, const GasModel& model, const BcSpec& bc,
                          double rho_floor) {
  const Grid& g = state.grid();
  Padded q(g);
  fill_primitives(state, model, rho_floor, q);
  return wall_values_from(q, g, model, bc, state.epsilon);
}

double stable_dt(const State& state, const GasModel& model, double cfl, double rho_floor) {
  const Grid& g = state.grid();
  const double ihx = 1.0 / g.hx();
  const double ihy = 1.0 / g.hy();
  const double visc = 2.0 * state.epsilon * (4.0 / 3.0 * model.mu + model.eta) *
                      (ihx * ihx + ihy * ihy);
  double rate = 0.0;
  for (std::size_t k = 0; k < state.rho.size(); ++k) {
    const double rho = std::max(state.rho[k], rho_floor);
    const double c = sound_speed(model, rho);
    const double u = std::abs(state.mom.x[k] / rho);
    const double v = std::abs(state.mom.y[k] / rho);
    rate = std::max(rate, (u + c) * ihx + (v + c) * ihy + visc / rho);
  }
  return rate > 0.0 ? cfl / rate : kInfinity;
}

State step(const State& state, const GasModel& model, const BcSpec& bc, double dt,
           Limiter limiter, double rho_floor, StepStats* stats) {
  const std::size_t n = state.rho.size();
  int floors = 0;

  State stage = state;
  {
    const Rhs k1 = evaluate_rhs(state, model, bc, limiter, rho_floor);
    for (std::size_t k = 0; k < n; ++k) {
      stage.rho[k] = state.rho[k] + dt * k1.rho[k];
      stage.mom.x[k] = state.mom.x[k] + dt * k1.mx[k];
      stage.mom.y[k] = state.mom.y[k] + dt * k1.my[k];
    }
    floors += apply_floor(stage, rho_floor);
  }
  State next = state;
  {
    const Rhs k2 = evaluate_rhs(stage, model, bc, limiter, rho_floor);
    for (std::size_t k = 0; k < n; ++k) {
      next.rho[k] = 0.5 * state.rho[k] + 0.5 * (stage.rho[k] + dt * k2.rho[k]);
      next.mom.x[k] = 0.5 * state.mom.x[k] + 0.5 * (stage.mom.x[k] + dt * k2.mx[k]);
      next.mom.y[k] = 0.5 * state.mom.y[k] + 0.5 * (stage.mom.y[k] + dt * k2.my[k]);
    }
    floors += apply_floor(next, rho_floor);
  }
  next.time = state.time + dt;
  if (stats) stats->floor_activations += floors;
  if (!all_finite(next)) throw BlowUpError("non-finite state after step", next.time, state);
  return next;
}

State initial_state(const RunConfig& config) {
  const Grid& g = config.grid;
  const InitialData& init = config.initial;
  State s(g);
  s.epsilon = config.epsilon;
  const double pi = std::numbers::pi;
  const double rho0 = init.param("rho0", 1.0);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double x = g.xc(i);
      const double y = g.yc(j);
      double rho = rho0;
      Vec2 u{};
      if (init.name == "rest") {
      } else if (init.name == "uniform") {
        u = {init.param("ux", 0.0), init.param("uy", 0.0)};
      } else if (init.name == "linear_shear") {
        u = {init.param("slope", 1.0) * y, 0.0};
      } else if (init.name == "shear") {
        // U(y) = offset + amplitude * {sin|cos}(k pi y / Ly); mode 0 = sin, 1 = cos.
        const double arg = init.param("k", 1.0) * pi * y / g.Ly;
        const double profile = init.param("mode", 0.0) == 0.0 ? std::sin(arg) : std::cos(arg);
        u = {init.param("offset", 0.0) + init.param("amplitude", 1.0) * profile, 0.0};
      } else if (init.name == "pulse") {
        const double sx = 2.0 * pi * (x / g.Lx - init.param("xc", 0.5));
        const double sy = 2.0 * pi * (y / g.Ly - init.param("yc", 0.5));
        const double bump = std::exp(init.param("sharpness", 4.0) * (std::cos(sx) + std::cos(sy) - 2.0));
        rho = rho0 + init.param("amplitude", 0.2) * bump;
        u = {init.param("ux", 0.1) * std::sin(2.0 * pi * y / g.Ly),
             init.param("uy", 0.1) * std::cos(2.0 * pi * x / g.Lx)};
      } else if (init.name == "channel_wave") {
        const double cy = std::cos(pi * y / g.Ly);
        const double sy = std::sin(pi * y / g.Ly);
        const double cx = std::cos(2.0 * pi * x / g.Lx);
        const double sx = std::sin(2.0 * pi * x / g.Lx);
        rho = rho0 + init.param("drho", 0.05) * cx * cy;
        u = {init.param("a", 0.5) * cy + init.param("b", 0.1) * cx * sy,
             init.param("c", 0.1) * sx * sy};
      } else {
        throw DomainError("unknown initial data '" + init.name + "'");
      }
      const std::size_t k = g.index(i, j);
      s.rho[k] = rho;
      s.mom.set(k, {rho * u.x, rho * u.y});
    }
  }
  return s;
}

double total_mass(const State& state) { return integrate(state.rho); }

double energy_total(const State& state, const GasModel& model, double rho_floor) {
  const VectorField u = velocity(state, rho_floor);
  ScalarField density(state.grid());
  for (std::size_t k = 0; k < density.size(); ++k) {
    const Vec2 uk = u.at(k);
    density[k] = 0.5 * state.rho[k] * dot(uk, uk) + h_energy(model, state.rho[k]);
  }
  return integrate(density);
}

double dissipation_integral(const State& state, const GasModel& model, const BcSpec& bc,
                            double rho_floor) {
  const VectorField u = velocity(state, rho_floor);
  const VectorWallValues wall = apply_bc(state, model, bc, rho_floor);
  return integrate(dissipation(model, gradient(u, &wall)));
}

double boundary_dissipation_integral(const State& state, const GasModel& model,
                                     const BcSpec& bc, double rho_floor) {
  if (bc.kind != BcSpec::Kind::NavierSlip || bc.lambda == 0.0) return 0.0;
  const VectorWallValues wall = apply_bc(state, model, bc, rho_floor);
  BoundaryTrace t = BoundaryTrace::zeros(state.grid());
  for (Wall w : {Wall::Bottom, Wall::Top}) {
    for (int i = 0; i < state.grid().nx; ++i) {
      const double ux = wall.x.on(w)[i];
      const double uy = wall.y.on(w)[i];
      t.on(w).values[i] = bc.lambda * (ux * ux + uy * uy);
    }
  }
  return boundary_integrate(t);
}

namespace {

StepRecord record_for(const State& s, const RunConfig& config) {
  StepRecord r;
  r.time = s.time;
  r.energy = energy_total(s, config.gas, config.rho_floor);
  r.dissipation = dissipation_integral(s, config.gas, config.bc, config.rho_floor);
  r.boundary_dissipation = boundary_dissipation_integral(s, config.gas, config.bc, config.rho_floor);
  r.mass = total_mass(s);
  return r;
}

Snapshot snapshot_of(const State& s, const RunConfig& config) {
  return Snapshot{s, apply_bc(s, config.gas, config.bc, config.rho_floor)};
}

}  // namespace

Trajectory run(const RunConfig& config) {
  config.validate();
  Trajectory traj;
  traj.config = config;
  State state = initial_state(config);
  traj.snapshots.push_back(snapshot_of(state, config));
  traj.log.push_back(record_for(state, config));

  const double t_end = config.t_final;
  const double tol = 1e-12 * std::max(1.0, t_end);
  long next_index = 1;
  auto next_snapshot_time = [&]() {
    if (!(config.snapshot_dt > 0.0)) return t_end;
    return std::min(t_end, static_cast<double>(next_index) * config.snapshot_dt);
  };

  StepStats stats;
  while (state.time < t_end - tol) {
    const double target = next_snapshot_time();
    double dt = stable_dt(state, config.gas, config.cfl, config.rho_floor);
    bool hit = false;
    if (state.time + dt >= target - tol) {
      dt = target - state.time;
      hit = true;
    }
    try {
      state = step(state, config.gas, config.bc, dt, config.limiter, config.rho_floor, &stats);
    } catch (const BlowUpError&) {
      traj.floor_activations = stats.floor_activations;
      throw;
    }
    if (hit) state.time = target;
    ++traj.steps;
    traj.log.push_back(record_for(state, config));
    if (hit) {
      traj.snapshots.push_back(snapshot_of(state, config));
      ++next_index;
    }
  }
  traj.floor_activations = stats.floor_activations;
  return traj;
}

std::vector<BalancePoint> energy_balance_residual(const Trajectory& trajectory) {
  const double eps = trajectory.config.epsilon;
  std::vector<StepRecord> records = trajectory.log;
  if (records.empty()) {
    for (const auto& snap : trajectory.snapshots) records.push_back(StepRecord{
        snap.state.time, energy_total(snap.state, trajectory.config.gas, trajectory.config.rho_floor),
        dissipation_integral(snap.state, trajectory.config.gas, trajectory.config.bc,
                             trajectory.config.rho_floor),
        boundary_dissipation_integral(snap.state, trajectory.config.gas, trajectory.config.bc,
                                      trajectory.config.rho_floor),
        total_mass(snap.state)});
  }
  std::vector<BalancePoint> out;
  if (records.empty()) return out;
  CompensatedSum acc;
  const double e0 = records.front().energy;
  out.push_back({records.front().time, 0.0});
  for (std::size_t k = 1; k < records.size(); ++k) {
    const auto& a = records[k - 1];
    const auto& b = records[k];
    const double dt = b.time - a.time;
    acc.add(0.5 * dt * (eps * (a.dissipation + b.dissipation) + a.boundary_dissipation +
                        b.boundary_dissipation));
    out.push_back({b.time, b.energy + acc.value() - e0});
  }
  return out;
}

}  // namespace cnse
