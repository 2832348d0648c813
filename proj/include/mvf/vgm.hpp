#ifndef MVF_VGM_HPP
#define MVF_VGM_HPP

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "mvf/circle.hpp"
#include "mvf/network.hpp"
#include "mvf/sparse.hpp"

namespace mvf {

/// Poiseuille edge conductance rho * pi * R^4 / (8 mu L). Pass rho = 1 for
/// volumetric fluxes.
inline double vgm_conductance(const Segment& s, double rho) {
  return rho * M_PI * s.radius * s.radius * s.radius * s.radius / (8.0 * s.mu_bl * s.length);
}

/// Wall exchange against a fixed tissue pressure field (standalone VGM use;
/// the fully coupled variant lives in the fd_model module).
struct WallExchangeSpec {
  const UniformGrid* grid = nullptr;
  const std::vector<double>* tissue_pressure = nullptr;
  const std::set<int>* capillary_ids = nullptr;
  double L_cap = 0.0;
  double rho_int = 1000.0;
  double oncotic_gap = 0.0;  // pi_p - pi_int
  int n_theta = 8;
  int n_quad_per_half = 1;
};

struct VgmSystem {
  const VascularNetwork* net = nullptr;
  double rho = 0.0;
  std::vector<char> segment_active;       // by segment id
  std::vector<char> node_active;          // by node id
  std::map<int, double> dirichlet;        // node id -> prescribed pressure
  std::vector<int> unknown_of_node;       // node id -> unknown index or -1
  std::vector<int> node_of_unknown;
  SparseMatrix A;
  std::vector<double> rhs;
};

/// One mass-balance row per active non-Dirichlet node; Dirichlet nodes are
/// eliminated into the right-hand side. Throws SingularSystemError when an
/// unknown cannot reach a Dirichlet node (unless drop_unreachable, in which
/// case unreachable components are deactivated).
VgmSystem assemble_vgm(const VascularNetwork& net, const std::set<int>& active_segments,
                       const std::map<int, double>& dirichlet, double rho,
                       const WallExchangeSpec* wall = nullptr, bool drop_unreachable = false);

/// Convenience overload: Dirichlet data from the node boundary pressures.
VgmSystem assemble_vgm(const VascularNetwork& net, const std::set<int>& active_segments,
                       double rho, const WallExchangeSpec* wall = nullptr);

struct VgmSolution {
  std::vector<double> node_pressure;  // NaN on inactive nodes
  std::vector<char> node_solved;
  SolveStats stats;
};

VgmSolution solve_vgm(const VgmSystem& sys, const SolveOptions& opts = {});

/// Mass (or volume, per the assembly rho) flux through a segment, positive
/// from n1 to n2.
double edge_flux(const VgmSystem& sys, const VgmSolution& sol, int seg_id);

/// Volume flux through one axis of an REV box: Dirichlet p_in/p_out on the
/// subnetwork nodes within eps_d of the inflow/outflow facets, no-flow
/// elsewhere. Returns VF_out [m^3/s]. Throws InfeasibleError when a facet has
/// no nodes.
double permeability_experiment(const VascularNetwork& net, const std::set<int>& member_ids,
                               const Box3& box, int axis, double p_in, double p_out,
                               double eps_d, const SolveOptions& opts = {});

}  // namespace mvf

#endif
