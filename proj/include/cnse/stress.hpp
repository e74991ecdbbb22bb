#pragma once

#include <optional>
#include <vector>

#include "cnse/fields.hpp"
#include "cnse/thermo.hpp"

namespace cnse {

/// Symmetric 2x2 stress; storing a single off-diagonal keeps sigma_xy == sigma_yx exactly.
struct Stress {
  double xx = 0.0, xy = 0.0, yy = 0.0;
  double yx() const { return xy; }
  Vec2 apply(Vec2 n) const { return {xx * n.x + xy * n.y, xy * n.x + yy * n.y}; }
};

struct StressField {
  ScalarField xx, xy, yy;
  explicit StressField(const Grid& grid) : xx(grid), xy(grid), yy(grid) {}
  const Grid& grid() const { return xx.grid(); }
  Stress at(std::size_t k) const { return {xx[k], xy[k], yy[k]}; }
};

/// sigma(G) = mu [(G + G^t) - 2/3 tr(G) I] + eta tr(G) I (the 2/3 factor is kept in 2D).
Stress stress(const GasModel& model, const Mat2& grad_u);
double stress_contract(const Stress& s, const Mat2& g);

StressField stress_tensor(const GasModel& model, const TensorField& grad_u);

/// Pointwise sigma(grad u) : grad u.
ScalarField dissipation(const GasModel& model, const TensorField& grad_u);

struct Coercivity {
  double lhs = 0.0;  // integral of sigma(grad u) : grad u
  double rhs = 0.0;  // integral of |grad u|^2
  /// lhs / rhs; empty when grad u vanishes identically.
  std::optional<double> theta0_hat;
};

Coercivity dissipation_coercivity(const GasModel& model, const VectorField& u,
                                  const VectorWallValues* wall = nullptr);

/// sigma(grad u) n . tau on both walls from the wall gradient.
BoundaryTrace boundary_stress_tangential(const GasModel& model, const VectorField& u,
                                         const VectorWallValues* wall = nullptr);

/// Wall curvature data (tau . grad) n . tau per wall; zero for the flat channel.
struct WallCurvature {
  double bottom = 0.0;
  double top = 0.0;
};

/// mu (omega x n) . tau - kappa u . tau with kappa = 2 mu (tau . grad) n . tau.
/// In 2D with tau = n^perp, (omega x n) . tau = omega.
double trace_from_vorticity(const GasModel& model, double omega, double u_tau,
                            double curvature);

/// Vorticity form of the wall stress: the cell-centred curl is extrapolated to the wall.
BoundaryTrace vorticity_trace_form(const GasModel& model, const VectorField& u,
                                   WallCurvature curvature = {});

/// Wall vorticity d u_y/dx - d u_x/dy evaluated from the wall gradient.
BoundaryTrace wall_vorticity(const VectorField& u, const VectorWallValues* wall = nullptr);

/// Tangential velocity u . tau on the walls.
BoundaryTrace wall_tangential_velocity(const VectorField& u,
                                       const VectorWallValues* wall = nullptr);

}  // namespace cnse
