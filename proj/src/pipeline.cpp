#include "mvf/pipeline.hpp"

#include "mvf/errors.hpp"
#include "mvf/synthetic.hpp"

namespace mvf {

ModelSetup prepare_with_network(const RunConfig& cfg, const VascularNetwork& net) {
  ModelSetup ws;
  ws.cfg = cfg;
  ws.net = prune_dead_ends(net, cfg.rheology());
  validate_positions(ws.net, cfg.domain);
  auto [large, cap] = split_by_threshold(ws.net, cfg.R_T);
  ws.I_L = std::move(large);
  ws.I_C = std::move(cap);
  ws.grid = UniformGrid(cfg.domain, cfg.grid);
  ws.dec = decompose_revs(ws.grid, cfg.rev, ws.net, ws.I_C, ws.I_L);
  return ws;
}

ModelSetup prepare(const RunConfig& cfg) {
  VascularNetwork net;
  if (cfg.synthetic) {
    LatticeSpec spec = *cfg.synthetic;
    spec.box = cfg.domain;
    net = generate_synthetic(spec, cfg.seed, cfg.R_T, cfg.rheology());
  } else if (!cfg.network_path.empty()) {
    net = load_network(cfg.network_path, cfg.rheology(), cfg.numerics.merge_tol);
  } else {
    throw ValidationError("config: neither a network path nor a synthetic spec given");
  }
  return prepare_with_network(cfg, net);
}

void prepare_hybrid(ModelSetup& ws) {
  UpscalingOptions opts;
  opts.dp = ws.cfg.numerics.dp_upscale;
  opts.k_floor = ws.cfg.numerics.k_floor;
  opts.eps_d = ws.cfg.numerics.eps_d;
  opts.solver = ws.cfg.solver();
  ws.coeffs = compute_rev_coefficients(ws.net, ws.dec, opts);
  ws.p_cap_boundary = capillary_boundary_field(ws.net, ws.I_C, ws.cfg.domain, ws.cfg.rev,
                                               ws.cfg.numerics.eps_d);
  ws.hybrid_ready = true;
}

FdProblem make_fd_problem(const ModelSetup& ws) {
  FdProblem prob;
  prob.net = &ws.net;
  prob.grid = ws.grid;
  prob.capillary_ids = ws.I_C;
  prob.params = ws.cfg.exchange();
  prob.n_theta = ws.cfg.numerics.n_theta;
  prob.n_quad_per_half = ws.cfg.numerics.n_quad_per_half;
  return prob;
}

HybridProblem make_hybrid_problem(const ModelSetup& ws, double alpha) {
  if (!ws.hybrid_ready)
    throw Error("make_hybrid_problem: call prepare_hybrid first");
  HybridProblem prob;
  prob.net = &ws.net;
  prob.grid = ws.grid;
  prob.dec = ws.dec;
  prob.coeffs = ws.coeffs;
  prob.I_L = ws.I_L;
  prob.alpha = alpha;
  prob.params = ws.cfg.exchange();
  prob.p_cap_boundary = ws.p_cap_boundary;
  prob.n_theta = ws.cfg.numerics.n_theta;
  return prob;
}

FluxReport run_fd_report(const ModelSetup& ws, FdSolution* solution) {
  FdProblem prob = make_fd_problem(ws);
  FdSolution sol = solve_fd(prob, ws.cfg.solver());
  FluxReport rep = flux_report_fd(prob, sol, ws.dec, ws.I_L, ws.I_C);
  if (solution) *solution = std::move(sol);
  return rep;
}

FluxReport run_hybrid_report(const ModelSetup& ws, double alpha, HybridSolution* solution) {
  HybridProblem prob = make_hybrid_problem(ws, alpha);
  HybridSolution sol = solve_hybrid(prob, ws.cfg.solver());
  FluxReport rep = flux_report_hybrid(prob, sol);
  if (solution) *solution = std::move(sol);
  return rep;
}

}  // namespace mvf
