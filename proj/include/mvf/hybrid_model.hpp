#ifndef MVF_HYBRID_MODEL_HPP
#define MVF_HYBRID_MODEL_HPP

#include <set>
#include <vector>

#include "mvf/fd_model.hpp"
#include "mvf/rev.hpp"
#include "mvf/upscaling.hpp"

namespace mvf {

/// Double-continuum problem: 1D large-vessel graph + homogenized capillary
/// continuum + tissue continuum on the same grid.
struct HybridProblem {
  const VascularNetwork* net = nullptr;
  UniformGrid grid;
  RevDecomposition dec;
  std::vector<RevCoefficients> coeffs;  // by REV id
  std::set<int> I_L;
  double alpha = 0.4;  // terminal coupling parameter in (0,1)
  ExchangeParams params;
  BoundaryField p_cap_boundary;
  int n_theta = 8;  // kept for parity with the FD configuration
};

/// Terminal coupling constant alpha_v_cap [kg/(Pa s)]:
///   rho_bl pi R_k^2 alpha Kv_bar_j / (mu_up_j L_j)
double coupling_coefficient(double terminal_radius, double alpha, const RevCoefficients& rev,
                            double rho_bl);

struct TerminalCoupling {
  int node = -1;
  int rev = -1;
  int lv_segment = -1;
  double radius = 0.0;
  double alpha_v_cap = 0.0;  // as assembled (ordered sum over REV cells)
};

/// Block system over (p^v | p^cap cells | p^t cells | one REV-average
/// auxiliary unknown per REV).
struct HybridSystem {
  const HybridProblem* prob = nullptr;
  int n_v = 0, n_cells = 0, n_rev = 0;
  std::vector<int> unknown_of_node;  // LV node id -> v-unknown or -1
  std::vector<int> node_of_unknown;
  SparseMatrix A;
  std::vector<double> rhs;
  std::vector<TerminalCoupling> terminals;
  std::vector<CouplingAudit> qv_audits;  // one per terminal
  std::vector<CouplingAudit> qt_audits;  // one per cell

  int v_index(int node) const { return unknown_of_node[node]; }
  int cap_index(int cell) const { return n_v + cell; }
  int tissue_index(int cell) const { return n_v + n_cells + cell; }
  int aux_index(int rev) const { return n_v + 2 * n_cells + rev; }
  int dim() const { return n_v + 2 * n_cells + n_rev; }
};

HybridSystem assemble_hybrid(const HybridProblem& prob);

struct HybridSolution {
  std::vector<double> node_pressure;     // LV nodes; NaN elsewhere
  std::vector<char> node_solved;
  std::vector<double> cap_pressure;      // per cell
  std::vector<double> tissue_pressure;   // per cell
  std::vector<double> rev_cap_average;   // auxiliary unknowns, per REV
  std::vector<TerminalCoupling> terminals;
  SolveStats stats;

  double terminal_transfer_total = 0.0;  // sum alpha_v_cap (p_v - p_cap_avg) [kg/s]
  double qt_total = 0.0;                 // capillary<-tissue exchange [kg/s]
};

HybridSolution solve_hybrid(const HybridProblem& prob, const SolveOptions& opts = {});

}  // namespace mvf

#endif
