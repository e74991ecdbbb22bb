#include "cnse/stress.hpp"

#include "cnse/summation.hpp"

namespace cnse {

Stress stress(const GasModel& model, const Mat2& g) {
  const double div = g.trace();
  const double bulk = (model.eta - 2.0 / 3.0 * model.mu) * div;
  return Stress{2.0 * model.mu * g.xx + bulk, model.mu * (g.xy + g.yx),
                2.0 * model.mu * g.yy + bulk};
}

double stress_contract(const Stress& s, const Mat2& g) {
  return s.xx * g.xx + s.xy * (g.xy + g.yx) + s.yy * g.yy;
}

StressField stress_tensor(const GasModel& model, const TensorField& grad_u) {
  StressField out(grad_u.grid());
  for (std::size_t k = 0; k < out.xx.size(); ++k) {
    const Stress s = stress(model, grad_u.at(k));
    out.xx[k] = s.xx;
    out.xy[k] = s.xy;
    out.yy[k] = s.yy;
  }
  return out;
}

ScalarField dissipation(const GasModel& model, const TensorField& grad_u) {
  ScalarField out(grad_u.grid());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const Mat2 g = grad_u.at(k);
    out[k] = stress_contract(stress(model, g), g);
  }
  return out;
}

Coercivity dissipation_coercivity(const GasModel& model, const VectorField& u,
                                  const VectorWallValues* wall) {
  const TensorField g = gradient(u, wall);
  ScalarField norm2(u.grid());
  for (std::size_t k = 0; k < norm2.size(); ++k) {
    const Mat2 m = g.at(k);
    norm2[k] = contract(m, m);
  }
  Coercivity out;
  out.lhs = integrate(dissipation(model, g));
  out.rhs = integrate(norm2);
  if (out.rhs > 0.0) out.theta0_hat = out.lhs / out.rhs;
  return out;
}

BoundaryTrace boundary_stress_tangential(const GasModel& model, const VectorField& u,
                                         const VectorWallValues* wall) {
  const Grid& grid = u.grid();
  if (!grid.has_walls()) throw DomainError("boundary stress requested on a torus");
  BoundaryTrace out = BoundaryTrace::zeros(grid);
  for (Wall w : {Wall::Bottom, Wall::Top}) {
    const auto grads = wall_gradient(u, w, wall);
    const Vec2 n = wall_normal(w);
    const Vec2 tau = wall_tangent(w);
    auto& values = out.on(w).values;
    for (int i = 0; i < grid.nx; ++i) values[i] = dot(stress(model, grads[i]).apply(n), tau);
  }
  return out;
}

double trace_from_vorticity(const GasModel& model, double omega, double u_tau,
                            double curvature) {
  const double kappa = 2.0 * model.mu * curvature;
  return model.mu * omega - kappa * u_tau;
}

BoundaryTrace vorticity_trace_form(const GasModel& model, const VectorField& u,
                                   WallCurvature curvature) {
  const Grid& grid = u.grid();
  if (!grid.has_walls()) throw DomainError("vorticity trace requested on a torus");
  const ScalarField omega = curl2d(u);
  const BoundaryTrace u_tau = wall_tangential_velocity(u);
  BoundaryTrace out = BoundaryTrace::zeros(grid);
  for (Wall w : {Wall::Bottom, Wall::Top}) {
    const auto omega_wall = wall_extrapolate(omega, w);
    const double k = w == Wall::Bottom ? curvature.bottom : curvature.top;
    auto& values = out.on(w).values;
    for (int i = 0; i < grid.nx; ++i)
      values[i] = trace_from_vorticity(model, omega_wall[i], u_tau.on(w).values[i], k);
  }
  return out;
}

BoundaryTrace wall_vorticity(const VectorField& u, const VectorWallValues* wall) {
  const Grid& grid = u.grid();
  BoundaryTrace out = BoundaryTrace::zeros(grid);
  for (Wall w : {Wall::Bottom, Wall::Top}) {
    const auto grads = wall_gradient(u, w, wall);
    auto& values = out.on(w).values;
    for (int i = 0; i < grid.nx; ++i) values[i] = grads[i].yx - grads[i].xy;
  }
  return out;
}

BoundaryTrace wall_tangential_velocity(const VectorField& u, const VectorWallValues* wall) {
  const Grid& grid = u.grid();
  BoundaryTrace out = BoundaryTrace::zeros(grid);
  for (Wall w : {Wall::Bottom, Wall::Top}) {
    const auto ux = wall_values_or_extrapolate(u.x, w, wall ? &wall->x : nullptr);
    const auto uy = wall_values_or_extrapolate(u.y, w, wall ? &wall->y : nullptr);
    const Vec2 tau = wall_tangent(w);
    auto& values = out.on(w).values;
    for (int i = 0; i < grid.nx; ++i) values[i] = dot(Vec2{ux[i], uy[i]}, tau);
  }
  return out;
}

}  // namespace cnse
