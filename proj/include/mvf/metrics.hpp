#ifndef MVF_METRICS_HPP
#define MVF_METRICS_HPP

#include <functional>
#include <set>
#include <vector>

#include "mvf/fd_model.hpp"
#include "mvf/hybrid_model.hpp"

namespace mvf {

/// Signed one-edge mass flux through a boundary node, positive into the
/// domain, with its rectified parts.
struct NodeFlux {
  double mf = 0.0, mf_in = 0.0, mf_out = 0.0;
};

NodeFlux node_mass_flux(const VascularNetwork& net, const std::vector<double>& node_pressure,
                        double rho_bl, int node_id);

/// Per-REV rectified flux triple (net = in - out).
struct RevFlux {
  int rev_id = -1;
  double net = 0.0, in = 0.0, out = 0.0;
};

inline RevFlux rectify(int rev_id, double net) {
  return {rev_id, net, net > 0.0 ? net : 0.0, net < 0.0 ? -net : 0.0};
}

/// Boundary mass-flux summary of one model run. Stored in kg/s; the CSV
/// writers render micrograms per second.
struct FluxReport {
  double mf_lv_in = 0.0, mf_lv_out = 0.0;
  double mf_cap_in = 0.0, mf_cap_out = 0.0;
  double mf_cap_t_in = 0.0, mf_cap_t_out = 0.0, mf_cap_t_net = 0.0;
  std::vector<RevFlux> rev_boundary;   // NF per boundary REV
  std::vector<RevFlux> rev_exchange;   // capillary-tissue exchange per REV
};

/// The capillary-continuum Darcy problem induced by REV coefficients and the
/// boundary field (shared by the hybrid assembly and the flux evaluation so
/// both use identical transmissibilities).
DarcyProblem capillary_darcy_problem(const UniformGrid& grid, const RevDecomposition& dec,
                                     const std::vector<RevCoefficients>& coeffs, double rho_bl,
                                     const BoundaryField& field);

/// Net flux of the capillary continuum through the domain boundary of one
/// boundary REV (Dirichlet half-cell fluxes, positive inward). Errors on
/// interior REVs.
RevFlux rev_net_flux(const DarcyProblem& cap_problem, const RevDecomposition& dec,
                     const std::vector<double>& cap_pressure, int rev_id);

/// Fully-discrete analogue: sums node mass fluxes of capillary boundary
/// nodes within the REV, rectifying after summation.
RevFlux fd_rev_capillary_flux(const VascularNetwork& net, const std::vector<double>& node_pressure,
                              double rho_bl, const std::set<int>& I_C, const UniformGrid& grid,
                              const RevDecomposition& dec, int rev_id);

/// Complete flux reports.
FluxReport flux_report_fd(const FdProblem& prob, const FdSolution& sol,
                          const RevDecomposition& dec, const std::set<int>& I_L,
                          const std::set<int>& I_C);
FluxReport flux_report_hybrid(const HybridProblem& prob, const HybridSolution& sol);

/// Capillary-tissue exchange tables alone (integrands as reported, with the
/// oncotic gap subtracted).
std::vector<RevFlux> cap_tissue_exchange_fd(const FdProblem& prob, const FdSolution& sol,
                                            const RevDecomposition& dec);
std::vector<RevFlux> cap_tissue_exchange_hybrid(const HybridProblem& prob,
                                                const HybridSolution& sol);

/// Averaged REV pressures of both models and their relative errors
/// (denominator: hybrid value).
struct RevPressureRow {
  int rev_id = -1;
  Vec3 center;
  double p_cap_hy = 0.0, p_cap_fd = 0.0, e_r_cap = 0.0;
  double p_t_hy = 0.0, p_t_fd = 0.0, e_r_t = 0.0;
};

std::vector<RevPressureRow> rev_pressures(const VascularNetwork& net, const UniformGrid& grid,
                                          const RevDecomposition& dec, const std::set<int>& I_C,
                                          const HybridSolution& hy, const FdSolution& fd);

/// Objective functions over the four (beta, gamma) flux pairs and the
/// large-vessel inflow alone [kg/s].
double objective_f1(const FluxReport& hy, const FluxReport& fd);
double objective_f2(const FluxReport& hy, const FluxReport& fd);

struct AlphaScanRow {
  double alpha = 0.0, f1 = 0.0, f2 = 0.0;
};
struct AlphaScanResult {
  std::vector<AlphaScanRow> rows;
  double argmin_f1 = 0.0, argmin_f2 = 0.0;
};

/// One hybrid solve per alpha against a fixed fully-discrete reference.
/// The grid is sorted ascending; ties break toward smaller alpha.
AlphaScanResult calibrate_alpha(const std::function<FluxReport(double)>& hybrid_report,
                                const FluxReport& fd_report, std::vector<double> alpha_grid);

/// abs(mean venous - mean arterial) over the large-vessel boundary nodes.
double boundary_pressure_delta(const VascularNetwork& net, const std::set<int>& I_L);

/// Copy of the network with arterial large-vessel boundary pressures shifted
/// by +delta*fraction/2 and venous ones by -delta*fraction/2.
VascularNetwork shift_boundary_pressures(const VascularNetwork& net, const std::set<int>& I_L,
                                         double fraction, const RheologyParams& rheology);

struct SensitivityRow {
  double fraction = 0.0;
  double alpha_star = 0.0;  // argmin of f2
  double delta = 0.0;
};

/// For each fraction: shift boundary data, recompute the FD reference,
/// rescan alpha on f2. Errors on unlabeled large-vessel boundary nodes.
std::vector<SensitivityRow> boundary_sensitivity(
    const VascularNetwork& net, const std::set<int>& I_L, const RheologyParams& rheology,
    const std::vector<double>& fractions, const std::vector<double>& alpha_grid,
    const std::function<FluxReport(const VascularNetwork&)>& fd_reference,
    const std::function<FluxReport(const VascularNetwork&, double)>& hybrid_report);

}  // namespace mvf

#endif
