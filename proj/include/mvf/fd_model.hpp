#ifndef MVF_FD_MODEL_HPP
#define MVF_FD_MODEL_HPP

#include <set>
#include <tuple>
#include <vector>

#include "mvf/circle.hpp"
#include "mvf/darcy.hpp"
#include "mvf/grid.hpp"
#include "mvf/network.hpp"
#include "mvf/sparse.hpp"

namespace mvf {

/// Physical parameters shared by the coupled models.
struct ExchangeParams {
  double K_t = 1e-18;       // tissue permeability [m^2]
  double mu_int = 1.3e-3;   // interstitial fluid viscosity [Pa s]
  double rho_int = 1000.0;  // interstitial fluid density [kg/m^3]
  double rho_bl = 1030.0;   // blood density [kg/m^3]
  double L_cap = 1e-12;     // capillary wall hydraulic conductivity [m/(Pa s)]
  double pi_p = 3300.0;     // plasma oncotic pressure [Pa]
  double pi_int = 666.0;    // interstitial oncotic pressure [Pa]

  double oncotic_gap() const { return pi_p - pi_int; }
};

/// Monolithic 3D-1D problem: the whole network as a graph, tissue as a
/// single continuum, Starling exchange across the capillary walls only.
struct FdProblem {
  const VascularNetwork* net = nullptr;
  UniformGrid grid;
  std::set<int> capillary_ids;  // exchange surface Gamma_C
  ExchangeParams params;
  int n_theta = 8;
  int n_quad_per_half = 1;
};

/// Antisymmetry audit of one coupling unit (a wall station or a terminal):
/// the balance-row entries are negated in-order sums of the spread-row
/// entries, column by column, so each family sums to zero exactly.
struct CouplingAudit {
  std::vector<std::tuple<int, int, double>> spread;   // (row, col, value)
  std::vector<std::tuple<int, int, double>> balance;  // (row, col, value)
  std::vector<double> spread_rhs;                     // per spread row, exchange part
  double balance_rhs = 0.0;
};

/// Block system over (p^t cells | p^v unknown nodes).
struct FdSystem {
  const FdProblem* prob = nullptr;
  int n_cells = 0;
  std::vector<int> unknown_of_node;  // node id -> coupled index or -1 (Dirichlet)
  std::vector<int> node_of_unknown;
  SparseMatrix A;
  std::vector<double> rhs;
  std::vector<WallStation> stations;
  std::vector<CouplingAudit> audits;  // one per station with a balance row
  int tissue_only_stations = 0;       // stations whose edge has two Dirichlet ends

  int tissue_index(int cell) const { return cell; }
  int network_index(int node) const { return n_cells + unknown_of_node[node]; }
};

FdSystem assemble_fd(const FdProblem& prob);

struct FdSolution {
  std::vector<double> tissue_pressure;  // per cell
  std::vector<double> node_pressure;    // per node, Dirichlet echoed
  SolveStats stats;

  // Conservation audit (steady state, no-flow tissue boundary): the network
  // boundary net flux equals the total wall exchange, and both vanish.
  double boundary_net_flux = 0.0;   // [kg/s]
  double wall_exchange_total = 0.0; // [kg/s], vessel -> tissue

  // Per-station values at the solution, for flux reporting with the same
  // quadrature as the assembly.
  struct StationValue {
    int seg_id;
    Vec3 position;
    double c;       // L_cap rho_int 2 pi R ds [kg/(Pa s)]
    double i_pv;    // interpolated network pressure [Pa]
    double pt_bar;  // circle-averaged tissue pressure [Pa]
  };
  std::vector<StationValue> station_values;
};

/// Monolithic solve. Throws SingularSystemError when L_cap == 0 (the tissue
/// block is pure Neumann and decouples with a constant nullspace).
FdSolution solve_fd(const FdProblem& prob, const SolveOptions& opts = {});

/// Evaluates station values against given fields (shared by solve_fd and the
/// flux metrics; guarantees reported exchange uses assembly quadrature).
std::vector<FdSolution::StationValue> evaluate_stations(
    const FdProblem& prob, const std::vector<WallStation>& stations,
    const std::vector<double>& tissue_pressure, const std::vector<double>& node_pressure);

}  // namespace mvf

#endif
