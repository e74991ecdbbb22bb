#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cnse/thermo.hpp"

namespace cnse {

enum class Topology : std::uint8_t { Torus = 0, Channel = 1 };

/// Uniform cell-centred mesh on [0,Lx] x [0,Ly]. Channel = periodic in x, walls at y = 0, Ly.
/// Storage is row-major with x fastest: index = j * nx + i.
struct Grid {
  int nx = 0;
  int ny = 0;
  double Lx = 1.0;
  double Ly = 1.0;
  Topology topology = Topology::Torus;

  static Grid make(int nx, int ny, double Lx, double Ly, Topology topology);
  void validate() const;

  double hx() const { return Lx / nx; }
  double hy() const { return Ly / ny; }
  double xc(int i) const { return (i + 0.5) * hx(); }
  double yc(int j) const { return (j + 0.5) * hy(); }
  double cell_area() const { return hx() * hy(); }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
  }
  bool has_walls() const { return topology == Topology::Channel; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Row i, column j holds d u_i / d x_j (columns of the matrix are the partial derivatives).
struct Mat2 {
  double xx = 0.0, xy = 0.0, yx = 0.0, yy = 0.0;
  double trace() const { return xx + yy; }
  Vec2 apply(Vec2 v) const { return {xx * v.x + xy * v.y, yx * v.x + yy * v.y}; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double contract(const Mat2& a, const Mat2& b) {
  return a.xx * b.xx + a.xy * b.xy + a.yx * b.yx + a.yy * b.yy;
}

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& grid, double fill = 0.0)
      : grid_(grid), values_(grid.size(), fill) {}

  const Grid& grid() const { return grid_; }
  double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

 private:
  Grid grid_{};
  std::vector<double> values_;
};

struct VectorField {
  ScalarField x;
  ScalarField y;

  VectorField() = default;
  explicit VectorField(const Grid& grid, double fill = 0.0) : x(grid, fill), y(grid, fill) {}
  const Grid& grid() const { return x.grid(); }
  Vec2 at(std::size_t k) const { return {x[k], y[k]}; }
  void set(std::size_t k, Vec2 v) {
    x[k] = v.x;
    y[k] = v.y;
  }
  friend bool operator==(const VectorField&, const VectorField&) = default;
};

/// Cell-centred velocity gradients; component (a, b) = d u_a / d x_b.
struct TensorField {
  ScalarField xx, xy, yx, yy;

  TensorField() = default;
  explicit TensorField(const Grid& grid) : xx(grid), xy(grid), yx(grid), yy(grid) {}
  const Grid& grid() const { return xx.grid(); }
  Mat2 at(std::size_t k) const { return {xx[k], xy[k], yx[k], yy[k]}; }
  void set(std::size_t k, const Mat2& m) {
    xx[k] = m.xx;
    xy[k] = m.xy;
    yx[k] = m.yx;
    yy[k] = m.yy;
  }
};

enum class Wall : std::uint8_t { Bottom = 0, Top = 1 };

/// Outward unit normal; the tangent is n rotated by +90 degrees, tau = (-n_y, n_x).
inline Vec2 wall_normal(Wall w) { return w == Wall::Bottom ? Vec2{0.0, -1.0} : Vec2{0.0, 1.0}; }
inline Vec2 wall_tangent(Wall w) { return w == Wall::Bottom ? Vec2{1.0, 0.0} : Vec2{-1.0, 0.0}; }

/// Prescribed values of a scalar on the two walls (one entry per boundary cell column).
struct WallValues {
  std::vector<double> bottom;
  std::vector<double> top;
  const std::vector<double>& on(Wall w) const { return w == Wall::Bottom ? bottom : top; }
};

/// Wall values of both velocity components.
struct VectorWallValues {
  WallValues x;
  WallValues y;
};

/// Samples of a quantity on one wall, with arc-length quadrature weights.
struct WallTrace {
  Wall wall = Wall::Bottom;
  std::vector<double> values;
  std::vector<double> weights;
};

struct BoundaryTrace {
  WallTrace bottom;
  WallTrace top;

  static BoundaryTrace zeros(const Grid& grid);
  WallTrace& on(Wall w) { return w == Wall::Bottom ? bottom : top; }
  const WallTrace& on(Wall w) const { return w == Wall::Bottom ? bottom : top; }
};

// Linear combinations used throughout diagnostics and tests.
ScalarField axpby(double a, const ScalarField& f, double b, const ScalarField& g);

/// Cell-centred gradient: central differences in the interior, one-sided second order on
/// wall rows. With `wall` the one-sided stencil uses the wall value instead of a third cell.
VectorField gradient(const ScalarField& f, const WallValues* wall = nullptr);
TensorField gradient(const VectorField& v, const VectorWallValues* wall = nullptr);

ScalarField divergence(const VectorField& v, const VectorWallValues* wall = nullptr);
/// Scalar vorticity d v_y/dx - d v_x/dy.
ScalarField curl2d(const VectorField& v, const VectorWallValues* wall = nullptr);

/// d f/dy evaluated on the wall itself (second order one-sided).
std::vector<double> wall_dy(const ScalarField& f, Wall w, const WallValues* wall = nullptr);
/// Quadratic extrapolation of f to the wall when no wall values are prescribed.
std::vector<double> wall_extrapolate(const ScalarField& f, Wall w);
/// Wall values of f: the prescribed ones if given, else the extrapolation.
std::vector<double> wall_values_or_extrapolate(const ScalarField& f, Wall w,
                                               const WallValues* wall);
/// Full velocity gradient on a wall, one matrix per boundary column.
std::vector<Mat2> wall_gradient(const VectorField& v, Wall w,
                                const VectorWallValues* wall = nullptr);

/// min(y, Ly - y) at cell centres; +inf on the torus.
ScalarField wall_distance(const Grid& grid);

struct Region {
  enum class Kind { All, Strip };
  Kind kind = Kind::All;
  double width = 0.0;
  static Region all() { return {}; }
  static Region strip(double width) { return {Kind::Strip, width}; }
};

/// Midpoint quadrature with compensated summation in fixed (row-major) order.
double integrate(const ScalarField& f, Region region = Region::all());
double boundary_integrate(const BoundaryTrace& trace);

}  // namespace cnse
