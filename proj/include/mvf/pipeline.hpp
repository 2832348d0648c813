#ifndef MVF_PIPELINE_HPP
#define MVF_PIPELINE_HPP

#include "mvf/config.hpp"
#include "mvf/hybrid_model.hpp"
#include "mvf/metrics.hpp"

namespace mvf {

/// Everything derived from a RunConfig: the (loaded or generated) network
/// after dead-end pruning, the threshold split, grid and REV partition.
struct ModelSetup {
  RunConfig cfg;
  VascularNetwork net;
  std::set<int> I_L, I_C;
  UniformGrid grid;
  RevDecomposition dec;
  std::vector<RevCoefficients> coeffs;  // filled by prepare_hybrid
  BoundaryField p_cap_boundary;         // filled by prepare_hybrid
  bool hybrid_ready = false;
};

ModelSetup prepare(const RunConfig& cfg);

/// Runs the upscaling pipeline (REV coefficients + capillary boundary field).
void prepare_hybrid(ModelSetup& ws);

/// Same derivation on a replacement network (shared grid/config), used by the
/// boundary sensitivity sweep.
ModelSetup prepare_with_network(const RunConfig& cfg, const VascularNetwork& net);

FdProblem make_fd_problem(const ModelSetup& ws);
HybridProblem make_hybrid_problem(const ModelSetup& ws, double alpha);

/// Solve + report in one step.
FluxReport run_fd_report(const ModelSetup& ws, FdSolution* solution = nullptr);
FluxReport run_hybrid_report(const ModelSetup& ws, double alpha,
                             HybridSolution* solution = nullptr);

}  // namespace mvf

#endif
