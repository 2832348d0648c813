#ifndef MVF_RHEOLOGY_HPP
#define MVF_RHEOLOGY_HPP

namespace mvf {

/// Blood rheology inputs: discharge hematocrit H in (0,1) and plasma viscosity [Pa*s].
struct RheologyParams {
  double H = 0.45;
  double mu_p = 1.0e-3;
};

/// Apparent relative viscosity at discharge hematocrit 0.45 for a
/// dimensionless vessel diameter D:
///   mu_045(D) = 6 exp(-0.085 D) + 3.2 - 2.44 exp(-0.06 D^0.645)
double mu_045(double D);

/// Hematocrit shape coefficient C(D) entering the in vivo viscosity law.
double viscosity_shape_coefficient(double D);

/// In vivo blood viscosity [Pa*s] for a dimensionless diameter D > 1.1.
/// The physical diameter in meters must be divided by 1 micrometer first
/// (see dimensionless_diameter). Throws std::domain_error for D <= 1.1.
double in_vivo_viscosity(double D, const RheologyParams& params);

/// Converts a physical diameter in meters to the dimensionless D used by
/// the viscosity law (division by 1.0e-6 m).
inline double dimensionless_diameter(double diameter_m) { return diameter_m / 1.0e-6; }

/// Poiseuille velocity magnitude v = R^2 dp / (8 mu L) [m/s].
double segment_velocity(double radius_m, double mu, double dp, double length_m);

}  // namespace mvf

#endif
