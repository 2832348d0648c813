#include "mvf/rheology.hpp"

#include <cmath>
#include <stdexcept>

namespace mvf {

double mu_045(double D) {
  if (D <= 0.0) throw std::domain_error("mu_045: diameter must be positive");
  return 6.0 * std::exp(-0.085 * D) + 3.2 - 2.44 * std::exp(-0.06 * std::pow(D, 0.645));
}

double viscosity_shape_coefficient(double D) {
  // 1/(1 + 1e-11 D^12) decays to 0 for large D; pow may overflow to inf,
  // which divides out cleanly.
  double s = 1.0 / (1.0 + 1.0e-11 * std::pow(D, 12.0));
  return (0.8 + std::exp(-0.075 * D)) * (-1.0 + s) + s;
}

double in_vivo_viscosity(double D, const RheologyParams& params) {
  if (D <= 1.1) throw std::domain_error("in_vivo_viscosity: D must exceed 1.1");
  if (params.H <= 0.0 || params.H >= 1.0)
    throw std::domain_error("in_vivo_viscosity: H must lie in (0,1)");
  if (params.mu_p <= 0.0) throw std::domain_error("in_vivo_viscosity: mu_p must be positive");

  double C = viscosity_shape_coefficient(D);
  // ((1-H)^C - 1) / ((1-0.45)^C - 1), evaluated via expm1 so the ratio stays
  // finite where C crosses zero (near D ~ 8). At C == 0 both sides vanish and
  // the limit is log(1-H)/log(0.55).
  double num = std::expm1(C * std::log1p(-params.H));
  double den = std::expm1(C * std::log1p(-0.45));
  double bracket = (den != 0.0) ? num / den : std::log1p(-params.H) / std::log1p(-0.45);

  double phi = D / (D - 1.1);
  double phi2 = phi * phi;
  return params.mu_p * (1.0 + (mu_045(D) - 1.0) * bracket * phi2) * phi2;
}

double segment_velocity(double radius_m, double mu, double dp, double length_m) {
  return radius_m * radius_m * dp / (8.0 * mu * length_m);
}

}  // namespace mvf
