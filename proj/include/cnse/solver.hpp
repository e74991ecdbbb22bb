#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cnse/fields.hpp"
#include "cnse/thermo.hpp"

namespace cnse {

/// Conserved variables (rho, m = rho u) at one instant.
struct State {
  ScalarField rho;
  VectorField mom;
  double time = 0.0;
  double epsilon = 0.0;

  State() = default;
  explicit State(const Grid& grid) : rho(grid), mom(grid) {}
  const Grid& grid() const { return rho.grid(); }

  friend bool operator==(const State&, const State&) = default;
};

/// Velocity m / rho where rho > rho_floor, zero elsewhere.
VectorField velocity(const State& state, double rho_floor = 1e-10);

struct BcSpec {
  enum class Kind { None, NavierSlip, NoSlip };
  Kind kind = Kind::None;
  double lambda = 0.0;

  static BcSpec none() { return {}; }
  static BcSpec navier_slip(double lambda);
  static BcSpec no_slip() { return {Kind::NoSlip, 0.0}; }
  /// BC for viscosity scale eps under the model's slip law (None on the torus).
  static BcSpec from_slip_law(const SlipLaw& law, double epsilon, Topology topology);

  /// lambda for the boundary dissipation term; +inf for no-slip, 0 for None.
  double effective_lambda() const;
};

enum class Limiter { None, Minmod, MonotonizedCentral };

/// Named initial condition with free numeric parameters.
struct InitialData {
  std::string name = "rest";
  std::map<std::string, double> params;
  double param(const std::string& key, double fallback) const;
};

struct RunConfig {
  Grid grid;
  GasModel gas;
  BcSpec bc;
  double epsilon = 0.0;
  double t_final = 0.5;
  double cfl = 0.4;
  double snapshot_dt = 0.05;
  InitialData initial;
  double rho_floor = 1e-10;
  Limiter limiter = Limiter::None;

  void validate() const;
};

/// Wall values of the velocity implied by the boundary condition: u.n = 0, and the tangential
/// value closing eps sigma n.tau + lambda u.tau = 0 (zero for no-slip). Empty on the torus.
VectorWallValues apply_bc(const State& state, const GasModel& model, const BcSpec& bc,
                          double rho_floor = 1e-10);

/// Per-step scalar ledger recorded by the integrator.
struct StepRecord {
  double time = 0.0;
  double energy = 0.0;
  double dissipation = 0.0;           // integral of sigma(grad u) : grad u
  double boundary_dissipation = 0.0;  // wall integral of lambda |u|^2
  double mass = 0.0;
};

struct Snapshot {
  State state;
  VectorWallValues wall;  // BC wall values at the snapshot (channel only)
};

struct Trajectory {
  RunConfig config;
  std::vector<Snapshot> snapshots;
  std::vector<StepRecord> log;
  int floor_activations = 0;
  int steps = 0;
};

class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, double time, State last)
      : std::runtime_error(what), time_(time), last_(std::move(last)) {}
  double time() const { return time_; }
  const State& last_state() const { return last_; }

 private:
  double time_;
  State last_;
};

struct StepStats {
  int floor_activations = 0;
};

/// Largest stable step: CFL over acoustic and viscous rates.
double stable_dt(const State& state, const GasModel& model, double cfl, double rho_floor = 1e-10);

/// One SSP-RK2 step of the finite-volume scheme (Rusanov convection, central viscous flux).
State step(const State& state, const GasModel& model, const BcSpec& bc, double dt,
           Limiter limiter = Limiter::None, double rho_floor = 1e-10,
           StepStats* stats = nullptr);

State initial_state(const RunConfig& config);

/// Integrate config.initial to config.t_final, snapshotting every snapshot_dt.
Trajectory run(const RunConfig& config);

double total_mass(const State& state);
/// Integral of rho |u|^2 / 2 + H(rho).
double energy_total(const State& state, const GasModel& model, double rho_floor = 1e-10);
/// Integral of sigma(grad u) : grad u with the BC wall values.
double dissipation_integral(const State& state, const GasModel& model, const BcSpec& bc,
                            double rho_floor = 1e-10);
/// Wall integral of lambda |u|^2 (zero for no-slip and the torus).
double boundary_dissipation_integral(const State& state, const GasModel& model,
                                     const BcSpec& bc, double rho_floor = 1e-10);

struct BalancePoint {
  double time = 0.0;
  double residual = 0.0;  // B(t)
};

/// B(t) = E(t) + eps int sigma:grad u + int lambda |u|^2 - E(0), trapezoid in time over the
/// step ledger (over snapshots when the ledger is empty).
std::vector<BalancePoint> energy_balance_residual(const Trajectory& trajectory);

}  // namespace cnse
