#include "cnse/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cnse {

namespace {

void require_nonnegative(double rho, const char* what) {
  if (!(rho >= 0.0)) throw DomainError(std::string(what) + ": negative density");
}

// g(x) = x^gamma - 1 - gamma (x - 1) at x = 1 + d. Below |d| = 0.1 the binomial series
// is summed directly; the closed form loses digits to cancellation there.
double bregman_core(double gamma, double d) {
  if (std::abs(d) < 0.1) {
    double coeff = gamma * (gamma - 1.0) / 2.0;  // C(gamma, 2)
    double power = d * d;
    double sum = 0.0;
    for (int k = 2; k < 24; ++k) {
      sum += coeff * power;
      coeff *= (gamma - k) / (k + 1.0);
      power *= d;
    }
    return sum;
  }
  const double x = 1.0 + d;
  return std::pow(x, gamma) - 1.0 - gamma * d;
}

// f(d) = x (x^(gamma-1) - 1)/(gamma - 1) - d, evaluated from its own binomial expansion
// (coefficients of (1+d)^(gamma-1)) so that it stays independent of bregman_core.
double flux_core(double gamma, double d) {
  const double g1 = gamma - 1.0;
  if (std::abs(d) < 0.1) {
    double b_prev = g1;  // C(gamma-1, 1)
    double b = g1 * (g1 - 1.0) / 2.0;
    double power = d * d;
    double sum = 0.0;
    for (int k = 2; k < 24; ++k) {
      sum += (b + b_prev) * power;
      b_prev = b;
      b *= (g1 - k) / (k + 1.0);
      power *= d;
    }
    return sum / g1;
  }
  const double x = 1.0 + d;
  return x * (std::pow(x, g1) - 1.0) / g1 - d;
}

void require_box(double r_min, double r_max, double rho_max, int samples) {
  if (!(r_min > 0.0) || !(r_max >= r_min) || !(rho_max > r_max))
    throw DomainError("invalid sampling box: need 0 < r_min <= r_max < rho_max");
  if (samples < 2) throw DomainError("need at least two samples per axis");
}

double sample_point(double lo, double hi, int k, int n) {
  if (n == 1 || hi == lo) return lo;
  return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
}

}  // namespace

SlipLaw SlipLaw::power(double lambda0, double alpha) {
  if (!(lambda0 >= 0.0)) throw DomainError("slip law: lambda0 must be >= 0");
  return SlipLaw{Kind::Power, lambda0, alpha};
}

double SlipLaw::lambda(double epsilon) const {
  if (kind == Kind::NoSlip) return kInfinity;
  if (lambda0 == 0.0) return 0.0;
  return lambda0 * std::pow(epsilon, alpha);
}

void GasModel::validate() const {
  if (!(a0 > 0.0)) throw DomainError("gas model: a0 must be > 0");
  if (!(gamma > 1.0)) throw DomainError("gas model: gamma must be > 1");
  if (!(mu > 0.0)) throw DomainError("gas model: mu must be > 0");
  if (!(eta > 0.0)) throw DomainError("gas model: eta must be > 0");
  if (slip_law.kind == SlipLaw::Kind::Power && !(slip_law.lambda0 >= 0.0))
    throw DomainError("gas model: slip coefficient must be >= 0");
}

double GasModel::stress_operator_norm() const {
  return std::max(2.0 * mu, 2.0 * mu / 3.0 + 2.0 * eta);
}

double pressure(const GasModel& model, double rho) {
  require_nonnegative(rho, "pressure");
  if (rho == 0.0) return 0.0;
  return model.a0 * std::pow(rho, model.gamma);
}

double sound_speed(const GasModel& model, double rho) {
  require_nonnegative(rho, "sound_speed");
  if (rho == 0.0) return 0.0;
  return std::sqrt(model.a0 * model.gamma * std::pow(rho, model.gamma - 1.0));
}

double h_energy(const GasModel& model, double rho) {
  require_nonnegative(rho, "h_energy");
  if (rho == 0.0) return 0.0;
  return model.a0 * std::pow(rho, model.gamma) / (model.gamma - 1.0);
}

double h_prime(const GasModel& model, double rho) {
  require_nonnegative(rho, "h_prime");
  if (rho == 0.0) return 0.0;
  return model.a0 * model.gamma * std::pow(rho, model.gamma - 1.0) / (model.gamma - 1.0);
}

double h_second(const GasModel& model, double rho) {
  require_nonnegative(rho, "h_second");
  if (rho == 0.0) {
    if (model.gamma < 2.0) return kInfinity;
    return model.gamma == 2.0 ? 2.0 * model.a0 : 0.0;
  }
  return model.a0 * model.gamma * std::pow(rho, model.gamma - 2.0);
}

double h_relative(const GasModel& model, double rho, double r) {
  require_nonnegative(rho, "h_relative");
  if (!(r > 0.0)) throw DomainError("h_relative: reference density must be > 0");
  const double d = (rho - r) / r;
  const double scale = model.a0 * std::pow(r, model.gamma) / (model.gamma - 1.0);
  return std::max(0.0, scale * bregman_core(model.gamma, d));
}

double bregman_flux(const GasModel& model, double rho, double r) {
  require_nonnegative(rho, "bregman_flux");
  if (!(r > 0.0)) throw DomainError("bregman_flux: reference density must be > 0");
  const double d = (rho - r) / r;
  return model.a0 * model.gamma * std::pow(r, model.gamma) * flux_core(model.gamma, d);
}

double equivalence_profile(const GasModel& model, double rho, double r) {
  const double gap = std::abs(rho - r);
  return gap <= 1.0 ? gap * gap : std::pow(gap, model.gamma);
}

EquivalenceConstants equiv_constants(const GasModel& model, double r_min, double r_max,
                                     double rho_max, int samples_per_axis) {
  require_box(r_min, r_max, rho_max, samples_per_axis);
  EquivalenceConstants out{std::numeric_limits<double>::infinity(), 0.0};
  for (int a = 0; a < samples_per_axis; ++a) {
    const double r = sample_point(r_min, r_max, a, samples_per_axis);
    for (int b = 0; b < samples_per_axis; ++b) {
      const double rho = sample_point(0.0, rho_max, b, samples_per_axis);
      if (std::abs(rho - r) <= 1e-12 * r) continue;
      const double ratio = h_relative(model, rho, r) / equivalence_profile(model, rho, r);
      out.c_low = std::min(out.c_low, ratio);
      out.c_high = std::max(out.c_high, ratio);
    }
  }
  return out;
}

double bregman_coercivity_constant(const GasModel& model, double r_min, double r_max,
                                   double rho_max, int samples_per_axis) {
  require_box(r_min, r_max, rho_max, samples_per_axis);
  double c0 = 0.0;
  for (int a = 0; a < samples_per_axis; ++a) {
    const double r = sample_point(r_min, r_max, a, samples_per_axis);
    for (int b = 0; b < samples_per_axis; ++b) {
      const double rho = sample_point(0.0, rho_max, b, samples_per_axis);
      if (std::abs(rho - r) <= 1e-12 * r) continue;
      c0 = std::max(c0, std::abs(bregman_flux(model, rho, r)) / h_relative(model, rho, r));
    }
  }
  return c0;
}

}  // namespace cnse
