#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace cnse {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Slip coefficient as a function of the viscosity scale: lambda(eps) = lambda0 * eps^alpha,
/// or +infinity for the no-slip convention.
struct SlipLaw {
  enum class Kind { Power, NoSlip };
  Kind kind = Kind::Power;
  double lambda0 = 0.0;
  double alpha = 1.0;

  static SlipLaw power(double lambda0, double alpha);
  static SlipLaw no_slip() { return SlipLaw{Kind::NoSlip, 0.0, 0.0}; }

  /// Returns +inf for NoSlip.
  double lambda(double epsilon) const;
};

/// Barotropic gas: p = a0 rho^gamma, viscous coefficients (mu, eta) and the wall slip law.
struct GasModel {
  double a0 = 1.0;
  double gamma = 1.4;
  double mu = 1.0;
  double eta = 1.0;
  SlipLaw slip_law{};

  /// Throws DomainError when a0 <= 0, gamma <= 1, mu <= 0, eta <= 0 or lambda0 < 0.
  void validate() const;

  /// Largest gain |sigma(G)| / |G| of the stress map (Frobenius norm).
  double stress_operator_norm() const;
};

double pressure(const GasModel& model, double rho);
double sound_speed(const GasModel& model, double rho);

/// H(rho) = a0 rho^gamma / (gamma - 1).
double h_energy(const GasModel& model, double rho);
/// H'(rho) = a0 gamma rho^(gamma-1) / (gamma - 1).
double h_prime(const GasModel& model, double rho);
/// H''(rho) = a0 gamma rho^(gamma-2). Requires rho > 0 when gamma < 2.
double h_second(const GasModel& model, double rho);

/// Bregman divergence H(rho; r) = H(rho) - H(r) - H'(r)(rho - r), evaluated without
/// catastrophic cancellation near rho = r.
double h_relative(const GasModel& model, double rho, double r);

/// rho (H'(rho) - H'(r)) - r (rho - r) H''(r): the density factor multiplying div w in the
/// reduced remainder. Same cancellation-free evaluation as h_relative.
double bregman_flux(const GasModel& model, double rho, double r);

/// Comparison profile: |rho-r|^2 for |rho-r| <= 1, |rho-r|^gamma otherwise.
double equivalence_profile(const GasModel& model, double rho, double r);

struct EquivalenceConstants {
  double c_low = 0.0;
  double c_high = 0.0;
};

/// Sampling density used by the two constant estimators (points per axis).
inline constexpr int kConstantSamplesPerAxis = 100;

/// Extremes of H(rho;r)/profile over a dense box r in [r_min, r_max], rho in [0, rho_max].
EquivalenceConstants equiv_constants(const GasModel& model, double r_min, double r_max,
                                     double rho_max,
                                     int samples_per_axis = kConstantSamplesPerAxis);

/// Smallest c0 with |bregman_flux| <= c0 H(rho;r) over the same sampled box.
double bregman_coercivity_constant(const GasModel& model, double r_min, double r_max,
                                   double rho_max,
                                   int samples_per_axis = kConstantSamplesPerAxis);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace cnse
