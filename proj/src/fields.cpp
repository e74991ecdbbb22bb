#include "cnse/fields.hpp"

#include <cmath>
#include <stdexcept>

#include "cnse/summation.hpp"

namespace cnse {

namespace {

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw std::invalid_argument("fields live on different grids");
}

const std::vector<double>* pick(const WallValues* wall, Wall w) {
  if (wall == nullptr) return nullptr;
  const auto& v = wall->on(w);
  return v.empty() ? nullptr : &v;
}

// d f/dy at cell centres of row j on a channel (walls below row 0 and above row ny-1).
double dy_channel(const ScalarField& f, int i, int j, const WallValues* wall) {
  const Grid& g = f.grid();
  const int n = g.ny;
  const double h = g.hy();
  if (j > 0 && j < n - 1) return (f(i, j + 1) - f(i, j - 1)) / (2.0 * h);
  if (j == 0) {
    if (const auto* wv = pick(wall, Wall::Bottom))
      return (-4.0 / 3.0 * (*wv)[i] + f(i, 0) + f(i, 1) / 3.0) / h;
    return (-3.0 * f(i, 0) + 4.0 * f(i, 1) - f(i, 2)) / (2.0 * h);
  }
  if (const auto* wv = pick(wall, Wall::Top))
    return (4.0 / 3.0 * (*wv)[i] - f(i, n - 1) - f(i, n - 2) / 3.0) / h;
  return (3.0 * f(i, n - 1) - 4.0 * f(i, n - 2) + f(i, n - 3)) / (2.0 * h);
}

}  // namespace

Grid Grid::make(int nx, int ny, double Lx, double Ly, Topology topology) {
  Grid g{nx, ny, Lx, Ly, topology};
  g.validate();
  return g;
}

void Grid::validate() const {
  if (nx < 8 || ny < 8) throw DomainError("grid: nx and ny must be >= 8");
  if (!(Lx > 0.0) || !(Ly > 0.0)) throw DomainError("grid: lengths must be > 0");
}

BoundaryTrace BoundaryTrace::zeros(const Grid& grid) {
  BoundaryTrace t;
  for (Wall w : {Wall::Bottom, Wall::Top}) {
    auto& wt = t.on(w);
    wt.wall = w;
    wt.values.assign(grid.nx, 0.0);
    wt.weights.assign(grid.nx, grid.hx());
  }
  return t;
}

ScalarField axpby(double a, const ScalarField& f, double b, const ScalarField& g) {
  require_same_grid(f.grid(), g.grid());
  ScalarField out(f.grid());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = a * f[k] + b * g[k];
  return out;
}

VectorField gradient(const ScalarField& f, const WallValues* wall) {
  const Grid& g = f.grid();
  VectorField out(g);
  const double hx = g.hx();
  const double hy = g.hy();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int ip = (i + 1) % g.nx;
      const int im = (i + g.nx - 1) % g.nx;
      const std::size_t k = g.index(i, j);
      out.x[k] = (f(ip, j) - f(im, j)) / (2.0 * hx);
      if (g.has_walls()) {
        out.y[k] = dy_channel(f, i, j, wall);
      } else {
        const int jp = (j + 1) % g.ny;
        const int jm = (j + g.ny - 1) % g.ny;
        out.y[k] = (f(i, jp) - f(i, jm)) / (2.0 * hy);
      }
    }
  }
  return out;
}

TensorField gradient(const VectorField& v, const VectorWallValues* wall) {
  require_same_grid(v.x.grid(), v.y.grid());
  const VectorField gx = gradient(v.x, wall ? &wall->x : nullptr);
  const VectorField gy = gradient(v.y, wall ? &wall->y : nullptr);
  TensorField out(v.grid());
  out.xx = gx.x;
  out.xy = gx.y;
  out.yx = gy.x;
  out.yy = gy.y;
  return out;
}

ScalarField divergence(const VectorField& v, const VectorWallValues* wall) {
  const TensorField g = gradient(v, wall);
  return axpby(1.0, g.xx, 1.0, g.yy);
}

ScalarField curl2d(const VectorField& v, const VectorWallValues* wall) {
  const TensorField g = gradient(v, wall);
  return axpby(1.0, g.yx, -1.0, g.xy);
}

std::vector<double> wall_dy(const ScalarField& f, Wall w, const WallValues* wall) {
  const Grid& g = f.grid();
  if (!g.has_walls()) throw DomainError("wall derivative requested on a torus");
  const int n = g.ny;
  const double h = g.hy();
  const auto* wv = pick(wall, w);
  std::vector<double> out(g.nx);
  for (int i = 0; i < g.nx; ++i) {
    if (w == Wall::Bottom) {
      out[i] = wv ? (-8.0 / 3.0 * (*wv)[i] + 3.0 * f(i, 0) - f(i, 1) / 3.0) / h
                  : (-2.0 * f(i, 0) + 3.0 * f(i, 1) - f(i, 2)) / h;
    } else {
      out[i] = wv ? (8.0 / 3.0 * (*wv)[i] - 3.0 * f(i, n - 1) + f(i, n - 2) / 3.0) / h
                  : (2.0 * f(i, n - 1) - 3.0 * f(i, n - 2) + f(i, n - 3)) / h;
    }
  }
  return out;
}

std::vector<double> wall_extrapolate(const ScalarField& f, Wall w) {
  const Grid& g = f.grid();
  if (!g.has_walls()) throw DomainError("wall extrapolation requested on a torus");
  const int n = g.ny;
  std::vector<double> out(g.nx);
  for (int i = 0; i < g.nx; ++i) {
    out[i] = w == Wall::Bottom
                 ? (15.0 * f(i, 0) - 10.0 * f(i, 1) + 3.0 * f(i, 2)) / 8.0
                 : (15.0 * f(i, n - 1) - 10.0 * f(i, n - 2) + 3.0 * f(i, n - 3)) / 8.0;
  }
  return out;
}

std::vector<double> wall_values_or_extrapolate(const ScalarField& f, Wall w,
                                               const WallValues* wall) {
  if (const auto* wv = pick(wall, w)) return *wv;
  return wall_extrapolate(f, w);
}

std::vector<Mat2> wall_gradient(const VectorField& v, Wall w, const VectorWallValues* wall) {
  const Grid& g = v.grid();
  const auto ux = wall_values_or_extrapolate(v.x, w, wall ? &wall->x : nullptr);
  const auto uy = wall_values_or_extrapolate(v.y, w, wall ? &wall->y : nullptr);
  const auto dux = wall_dy(v.x, w, wall ? &wall->x : nullptr);
  const auto duy = wall_dy(v.y, w, wall ? &wall->y : nullptr);
  const double hx = g.hx();
  std::vector<Mat2> out(g.nx);
  for (int i = 0; i < g.nx; ++i) {
    const int ip = (i + 1) % g.nx;
    const int im = (i + g.nx - 1) % g.nx;
    out[i] = Mat2{(ux[ip] - ux[im]) / (2.0 * hx), dux[i], (uy[ip] - uy[im]) / (2.0 * hx),
                  duy[i]};
  }
  return out;
}

ScalarField wall_distance(const Grid& grid) {
  ScalarField d(grid, kInfinity);
  if (!grid.has_walls()) return d;
  for (int j = 0; j < grid.ny; ++j) {
    const double y = grid.yc(j);
    const double dist = std::min(y, grid.Ly - y);
    for (int i = 0; i < grid.nx; ++i) d(i, j) = dist;
  }
  return d;
}

double integrate(const ScalarField& f, Region region) {
  const Grid& g = f.grid();
  CompensatedSum acc;
  if (region.kind == Region::Kind::All) {
    for (std::size_t k = 0; k < f.size(); ++k) acc.add(f[k]);
    return acc.value() * g.cell_area();
  }
  if (!g.has_walls()) throw DomainError("strip integral requested on a torus");
  if (!(region.width >= 0.0)) throw DomainError("strip width must be >= 0");
  for (int j = 0; j < g.ny; ++j) {
    const double y = g.yc(j);
    if (std::min(y, g.Ly - y) > region.width) continue;
    for (int i = 0; i < g.nx; ++i) acc.add(f(i, j));
  }
  return acc.value() * g.cell_area();
}

double boundary_integrate(const BoundaryTrace& trace) {
  CompensatedSum acc;
  for (const WallTrace* wt : {&trace.bottom, &trace.top}) {
    if (wt->values.size() != wt->weights.size())
      throw std::invalid_argument("boundary trace: values/weights length mismatch");
    for (std::size_t i = 0; i < wt->values.size(); ++i) acc.add(wt->values[i] * wt->weights[i]);
  }
  return acc.value();
}

}  // namespace cnse
