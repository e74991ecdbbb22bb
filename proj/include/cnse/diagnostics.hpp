#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cnse/reference.hpp"
#include "cnse/solver.hpp"
#include "cnse/stress.hpp"

namespace cnse {

struct WeakFormResidual {
  double mass = 0.0;      // [int rho r]_0^T - int int (rho r_t + rho u . grad r)
  double momentum = 0.0;  // [int rho u . w]_0^T - int int (rho u . w_t + rho u (x) u : grad w
                          //   + p div w - eps sigma : grad w) - wall term
  std::vector<double> time;
};

/// Weak mass and momentum identities tested against (r, w), time integrals by trapezoid over
/// the snapshots. Wall term: -int lambda u . w for Navier slip, int eps sigma n . w for no-slip.
WeakFormResidual weak_form_residual(const Trajectory& trajectory, const TestPair& pair);

/// Integral of rho |u - w|^2 / 2 + H(rho; r).
double relative_energy(const State& state, const GasModel& model, const PairSample& pair,
                       double rho_floor = 1e-10);

/// Remainder with every term written out: transport, viscous, wall, pressure-potential and
/// div w terms, evaluated by midpoint quadrature.
double remainder_full(const State& state, const VectorWallValues& wall, const GasModel& model,
                      const BcSpec& bc, const PairSample& pair, double rho_floor = 1e-10);

/// Remainder regrouped with the Euler residual E(r, w) of the pair.
struct ReducedRemainder {
  double forcing = 0.0;    // int rho E . (w - u)
  double viscous = 0.0;    // eps int sigma(grad u) : grad w
  double boundary = 0.0;   // wall int lambda u . w
  double bregman = 0.0;    // -int [rho (H'(rho) - H'(r)) - r (rho - r) H''(r) - H(rho; r)] div w
  double stretch = 0.0;    // int rho ((u - w) . grad) w . (w - u)
  double mass = 0.0;       // int (r - rho) H''(r) (r_t + div(r w))
  double total() const { return forcing + viscous + boundary + bregman + stretch + mass; }
};

ReducedRemainder remainder_reduced(const State& state, const VectorWallValues& wall,
                                   const GasModel& model, const BcSpec& bc,
                                   const PairSample& pair, double rho_floor = 1e-10);

/// Inputs of the Gronwall bound on a common time grid.
struct GronwallInput {
  std::vector<double> time;
  std::vector<double> e_rel;
  std::vector<double> div_w_inf;
  std::vector<double> forcing;  // int rho E . (w - u) + C0 eps int |grad w|^2 (+ extra terms)
  std::vector<double> stretch;  // optional extra growth rate, added to c0 ||div w||
  double c0 = 0.0;
  double slack_fraction = 0.05;
};

struct GronwallResult {
  std::vector<double> bound;
  double margin = 0.0;  // max_t E_rel(t) - bound(t)
  double slack = 0.0;   // slack_fraction (E_rel(0) + peak integrated forcing)
  bool pass = false;
};

/// bound(t) = E_rel(0) exp(A(t)) + int_0^t exp(A(t) - A(s)) f(s) ds with
/// A(t) = int_0^t [c0 ||div w|| + stretch], trapezoid in time.
GronwallResult gronwall_check(const GronwallInput& input);

struct KatoComponents {
  double h = 0.0;     // int H(rho)
  double u = 0.0;     // eps int rho |u|^2 / d^2
  double grad = 0.0;  // eps int |grad u|^2
  double total() const { return h + u + grad; }
};

/// Strip integrands at one instant over {d <= strip_width}.
KatoComponents kato_integrand(const State& state, const VectorWallValues& wall,
                              const GasModel& model, double epsilon, double strip_width,
                              double rho_floor = 1e-10);

struct KatoResult {
  KatoComponents integral;
  std::vector<double> time;
  std::vector<KatoComponents> integrand;
};

/// Time integral (trapezoid over snapshots t0 <= t <= t1) of the strip integrands.
KatoResult kato_integral(const Trajectory& trajectory, const GasModel& model, double epsilon,
                         double strip_width, double t0 = -kInfinity, double t1 = kInfinity);

struct PairingResult {
  double route_a = 0.0;  // int_0^T int_walls eps sigma n . tau (w . tau)
  double route_b = 0.0;  // volume identity with the fake layer
  double discrepancy() const { return route_a - route_b; }
  std::vector<double> time;
  std::vector<double> wall_integrand;    // per-snapshot integrand of route (a)
  std::vector<double> volume_integrand;  // per-snapshot integrand of route (b)
};

/// Tangential wall-stress pairing against test_w, by the wall trace and by the volume identity
/// [int rho u . w_eps]_0^T - int int [rho u . d_t w_eps + rho u (x) u : grad w_eps
///  + p div w_eps - eps sigma : grad w_eps].
PairingResult bardos_titi_pairing(const Trajectory& trajectory, const GasModel& model,
                                  const TestPairPtr& test_w, double layer_c0);

struct CkvResult {
  std::vector<double> time;
  std::vector<double> margin;  // M_eps(t) = max(0, -min_walls eps omega)
  double integral = 0.0;
  bool reference_tangent_nonnegative = true;
};

CkvResult ckv_margin(const Trajectory& trajectory, const TestPair* reference = nullptr);

struct ReportOptions {
  double strip_factor = 1.0;    // Kato strip width = strip_factor * eps
  double layer_c0 = 0.5;        // fake-layer width = layer_c0 * eps
  double split = 0.5;           // fraction of theta0 used to absorb the viscous cross term
  double slack_fraction = 0.05;
  bool pairing_route_b = true;  // skip the fake-layer route when the grid cannot resolve it
};

struct ReportRow {
  double time = 0.0;
  double energy = 0.0;
  double dissipation = 0.0;
  double boundary_dissipation = 0.0;
  double e_rel = 0.0;
  double remainder = 0.0;
  KatoComponents kato;
  double pairing_increment = 0.0;
  double ckv = 0.0;
};

struct CriteriaReport {
  std::vector<ReportRow> rows;
  KatoComponents kato;
  double pairing_a = 0.0;
  double pairing_b = 0.0;
  double ckv_integral = 0.0;
  bool reference_tangent_nonnegative = true;
  std::optional<double> theta0_hat;  // min over snapshots
  double c0 = 0.0;                   // Bregman coercivity constant
  double C0 = 0.0;                   // viscous cross-term constant
  GronwallResult gronwall;           // exponent c0 ||div w|| + 2 ||sym grad w||
  GronwallResult gronwall_div_only;  // exponent c0 ||div w|| only
  double e_rel_final = 0.0;
  double max_balance_residual = 0.0;      // max_t B(t)
  double max_abs_balance_residual = 0.0;  // max_t |B(t)|
  int floor_activations = 0;
};

CriteriaReport criteria_report(const Trajectory& trajectory, const TestPair& pair,
                               const ReportOptions& options = {});

/// One row per snapshot: time,E,diss,bdiss,Erel,R,K_H,K_u,K_grad,P_inc,M (%.17g).
std::string report_csv(const CriteriaReport& report);
inline constexpr const char* kReportHeader = "time,E,diss,bdiss,Erel,R,K_H,K_u,K_grad,P_inc,M";

}  // namespace cnse
