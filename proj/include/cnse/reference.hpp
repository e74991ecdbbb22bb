#pragma once

#include <array>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "cnse/fields.hpp"
#include "cnse/solver.hpp"
#include "cnse/thermo.hpp"

namespace cnse {

/// Values and first derivatives of a test pair (r, w) at one point.
struct PairPoint {
  double r = 1.0;
  double r_t = 0.0;
  Vec2 grad_r{};
  Vec2 w{};
  Vec2 w_t{};
  Mat2 grad_w{};  // (a, b) = d w_a / d x_b
};

/// E(r, w) = w_t + (w . grad) w + grad H'(r).
Vec2 euler_residual(const GasModel& model, const PairPoint& p);
/// r_t + div(r w).
double mass_residual(const PairPoint& p);

/// A pair sampled on a grid at one time.
struct PairSample {
  double time = 0.0;
  ScalarField r, r_t;
  VectorField grad_r, w, w_t;
  TensorField grad_w;
  VectorField residual;       // E(r, w)
  ScalarField mass_residual;  // r_t + div(r w)
  VectorWallValues w_wall;    // w on the walls (channel only)
  double div_w_inf = 0.0;
  double sym_grad_w_inf = 0.0;  // max over cells of the spectral radius of sym(grad w)
  double r_min = 0.0;
  double r_max = 0.0;
  double wall_normal_max = 0.0;  // max |w . n| on the walls
};

class TestPair {
 public:
  virtual ~TestPair() = default;
  virtual std::string name() const = 0;
  virtual PairPoint eval(double x, double y, double t) const = 0;
  /// Sample onto a grid; the default evaluates eval() at cell centres and wall points.
  virtual PairSample sample(const Grid& grid, const GasModel& model, double t) const;
};

using TestPairPtr = std::shared_ptr<const TestPair>;

/// Scalar profile W(y) on [0, Ly]: offset + amplitude * {sin|cos}(k pi y / Ly), or slope * y.
struct Profile {
  enum class Kind { Sin, Cos, Linear };
  Kind kind = Kind::Sin;
  double amplitude = 1.0;
  double k = 1.0;
  double offset = 0.0;
  double Ly = 1.0;

  double value(double y) const;
  double derivative(double y) const;
};

/// r = r0, w = (W(y), 0): a steady exact Euler solution.
class ShearPair final : public TestPair {
 public:
  ShearPair(Profile profile, double r0);
  std::string name() const override { return "shear"; }
  PairPoint eval(double x, double y, double t) const override;

 private:
  Profile profile_;
  double r0_;
};

/// Pair given by closed-form r and w. Derivatives come from the supplied exact expression
/// when present, otherwise from sixth-order central differences with step fd_step.
class ManufacturedPair final : public TestPair {
 public:
  using ScalarFn = std::function<double(double, double, double)>;
  using VectorFn = std::function<Vec2(double, double, double)>;
  using ExactFn = std::function<PairPoint(double, double, double)>;

  ManufacturedPair(std::string name, ScalarFn r, VectorFn w, ExactFn exact = {},
                   double fd_step = 1e-3);
  std::string name() const override { return name_; }
  PairPoint eval(double x, double y, double t) const override;
  /// Derivatives by finite differences regardless of the exact expression.
  PairPoint eval_finite_difference(double x, double y, double t) const;
  bool has_exact() const { return static_cast<bool>(exact_); }

 private:
  std::string name_;
  ScalarFn r_;
  VectorFn w_;
  ExactFn exact_;
  double fd_step_;
};

/// r = 1, w = (A sin(pi y / Ly) cos t, 0); E = (-A sin(pi y / Ly) sin t, 0).
std::shared_ptr<ManufacturedPair> oscillating_shear_pair(double amplitude, double Ly);

/// Incompressible cellular flow on the channel with nonzero wall slip:
/// w = curl of psi = f(t) [-(A Ly / pi) sin(pi y / Ly) + B sin(2 pi x / Lx) sin^2(pi y / Ly)],
/// f(t) = 1 + 0.5 sin t, r = 1.
std::shared_ptr<ManufacturedPair> channel_cell_pair(double A, double B, double Lx, double Ly);

/// Parameters of the mass-conserving Fourier family on the torus.
struct FourierPairParams {
  double r0 = 1.0;
  double a = 0.1;       // density wave amplitude
  int k1 = 1, k2 = 0;   // density wave numbers
  double omega = 1.0;   // density wave frequency
  double phase = 0.0;
  double b = 0.1;       // stream function amplitude
  int l1 = 0, l2 = 1;   // stream function wave numbers
  double phase2 = 0.0;
  double nu = 1.0;      // stream function frequency
};

/// r = r0 + a sin(theta), r w = (a omega / |k|^2) sin(theta) k + curl psi with
/// psi = b sin(l . x + phase2) cos(nu t); mass residual vanishes identically.
std::shared_ptr<ManufacturedPair> fourier_pair(const FourierPairParams& p, double Lx, double Ly);

class ReferenceNotSmooth : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (r, w) taken from an Euler-mode trajectory. Space: bilinear interpolation of per-snapshot
/// fields (derivatives by grid operators on the reference grid); time: linear interpolation,
/// with time derivatives from snapshot differences.
class NumericEulerPair final : public TestPair {
 public:
  explicit NumericEulerPair(const Trajectory& euler, double growth_limit = 10.0);
  std::string name() const override { return "euler_numeric"; }
  PairPoint eval(double x, double y, double t) const override;
  const Grid& grid() const { return grid_; }
  double max_gradient_growth() const { return growth_; }

 private:
  struct Frame {
    double time;
    ScalarField r, r_t;
    VectorField grad_r, w, w_t;
    TensorField grad_w;
  };
  Grid grid_;
  std::vector<Frame> frames_;
  double growth_ = 1.0;
};

/// Run the Euler-mode reference for a diagnostics config: same initial data, epsilon = 0, grid
/// refined by `refine` in each direction, snapshots every snapshot_dt.
TestPairPtr euler_numeric_reference(RunConfig config, int refine = 2, double snapshot_dt = 0.025);

/// Cutoff chi(z) = (1 - z)^2 (1 + 2 z) on [0, 1], 1 below 0, 0 above 1.
double layer_cutoff(double z);
double layer_cutoff_derivative(double z);

/// Kato fake layer w_eps = w chi(d / (c0 eps)); r is passed through.
class FakeLayer final : public TestPair {
 public:
  FakeLayer(TestPairPtr base, double epsilon, double c0, double Ly);
  std::string name() const override { return "fake_layer(" + base_->name() + ")"; }
  PairPoint eval(double x, double y, double t) const override;
  double width() const { return c0_ * epsilon_; }
  double epsilon() const { return epsilon_; }
  double Ly() const { return Ly_; }

 private:
  TestPairPtr base_;
  double epsilon_;
  double c0_;
  double Ly_;
};

TestPairPtr fake_layer(TestPairPtr base, const Grid& grid, double epsilon, double c0 = 0.5);

struct LayerBounds {
  double div = 0.0;       // max |div w_eps|
  double dt = 0.0;        // max |d_t w_eps|
  double eps_grad = 0.0;  // max eps |grad w_eps|
  double total() const { return div + dt + eps_grad; }
};

/// Sup norms of the fake layer measured on a dense sample set: nx points across, ny points
/// through each wall strip, at the given times.
LayerBounds measure_layer_bounds(const FakeLayer& layer, double Lx, const std::vector<double>& times,
                                 int nx = 64, int ny = 400);

}  // namespace cnse
