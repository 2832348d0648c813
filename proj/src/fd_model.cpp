#include "mvf/fd_model.hpp"

#include <cmath>

#include "mvf/errors.hpp"
#include "mvf/vgm.hpp"

namespace mvf {

namespace {

DarcyProblem tissue_problem(const FdProblem& prob) {
  DarcyProblem tp;
  tp.grid = prob.grid;
  double mob = prob.params.rho_int * prob.params.K_t / prob.params.mu_int;
  tp.mobility.assign(prob.grid.num_cells(), Vec3{mob, mob, mob});
  // all faces no-flow
  return tp;
}

}  // namespace

FdSystem assemble_fd(const FdProblem& prob) {
  if (!prob.net) throw ValidationError("assemble_fd: missing network");
  const VascularNetwork& net = *prob.net;
  validate_positions(net, prob.grid.box());

  FdSystem sys;
  sys.prob = &prob;
  sys.n_cells = prob.grid.num_cells();

  sys.unknown_of_node.assign(net.nodes.size(), -1);
  for (const auto& nd : net.nodes) {
    if (nd.kind == NodeKind::interior) {
      sys.unknown_of_node[nd.id] = static_cast<int>(sys.node_of_unknown.size());
      sys.node_of_unknown.push_back(nd.id);
    }
  }
  bool any_dirichlet = false;
  for (const auto& nd : net.nodes) any_dirichlet |= nd.kind == NodeKind::boundary;
  if (!any_dirichlet)
    throw SingularSystemError("assemble_fd: network has no Dirichlet boundary node");

  int n_total = sys.n_cells + static_cast<int>(sys.node_of_unknown.size());
  sys.A = SparseMatrix(n_total);
  sys.rhs.assign(n_total, 0.0);

  // Tissue diffusion block (no-flow boundary).
  assemble_darcy_into(tissue_problem(prob), sys.A, sys.rhs, 0);

  // Network flow rows: one mass balance per interior node.
  auto dirichlet_value = [&](int node) { return *net.nodes[node].boundary_pressure; };
  for (const auto& s : net.segments) {
    double g = vgm_conductance(s, prob.params.rho_bl);
    int ends[2] = {s.n1, s.n2};
    for (int e = 0; e < 2; ++e) {
      int k = ends[e], j = ends[1 - e];
      if (sys.unknown_of_node[k] < 0) continue;
      int row = sys.network_index(k);
      sys.A.add(row, row, g);
      if (sys.unknown_of_node[j] >= 0)
        sys.A.add(row, sys.network_index(j), -g);
      else
        sys.rhs[row] += g * dirichlet_value(j);
    }
  }

  // Starling wall exchange on the capillary surface.
  if (prob.params.L_cap != 0.0 && !prob.capillary_ids.empty()) {
    sys.stations = build_wall_stations(net, prob.capillary_ids, prob.grid, prob.n_theta,
                                       prob.n_quad_per_half);
    double gap = prob.params.oncotic_gap();
    for (const auto& st : sys.stations) {
      const Segment& seg = net.segments[st.seg_id];
      double c = prob.params.L_cap * prob.params.rho_int * st.surface_weight;

      struct VCoef {
        int node;
        double coef;
      };
      VCoef vc[2] = {{seg.n1, c * st.interp_n1}, {seg.n2, c * st.interp_n2}};

      if (st.owner_node < 0) {
        // Both endpoints Dirichlet: the exchange acts on the tissue only.
        sys.tissue_only_stations++;
        for (auto [cell, w] : st.stencil.cell_weights) {
          for (const auto& v : vc) sys.rhs[cell] += w * v.coef * dirichlet_value(v.node);
          for (auto [mcell, wm] : st.stencil.cell_weights)
            sys.A.add(cell, mcell, w * (c * wm));
          sys.rhs[cell] -= w * (c * gap);
        }
        continue;
      }

      CouplingAudit audit;
      int balance_row = sys.network_index(st.owner_node);

      // Network pressure columns (or Dirichlet RHS parts).
      for (const auto& v : vc) {
        if (sys.unknown_of_node[v.node] >= 0) {
          int col = sys.network_index(v.node);
          double sum = 0.0;
          for (auto [cell, w] : st.stencil.cell_weights) {
            double val = -w * v.coef;
            sys.A.add(cell, col, val);
            audit.spread.emplace_back(cell, col, val);
            sum += val;
          }
          double bval = -sum;  // = coef * sum(w) with identical rounding
          sys.A.add(balance_row, col, bval);
          audit.balance.emplace_back(balance_row, col, bval);
        }
      }

      // Tissue pressure columns (circle-average coupling).
      for (auto [mcell, wm] : st.stencil.cell_weights) {
        double sum = 0.0;
        for (auto [cell, w] : st.stencil.cell_weights) {
          double val = w * (c * wm);
          sys.A.add(cell, mcell, val);
          audit.spread.emplace_back(cell, mcell, val);
          sum += val;
        }
        double bval = -sum;
        sys.A.add(balance_row, mcell, bval);
        audit.balance.emplace_back(balance_row, mcell, bval);
      }

      // Constant parts: oncotic gap and Dirichlet endpoint pressures.
      double rhs_sum = 0.0;
      for (auto [cell, w] : st.stencil.cell_weights) {
        double r = -w * (c * gap);
        for (const auto& v : vc)
          if (sys.unknown_of_node[v.node] < 0) r += w * v.coef * dirichlet_value(v.node);
        sys.rhs[cell] += r;
        audit.spread_rhs.push_back(r);
        rhs_sum += r;
      }
      audit.balance_rhs = -rhs_sum;
      sys.rhs[balance_row] += audit.balance_rhs;
      sys.audits.push_back(std::move(audit));
    }
  }

  sys.A.finalize();
  return sys;
}

std::vector<FdSolution::StationValue> evaluate_stations(
    const FdProblem& prob, const std::vector<WallStation>& stations,
    const std::vector<double>& tissue_pressure, const std::vector<double>& node_pressure) {
  std::vector<FdSolution::StationValue> out;
  out.reserve(stations.size());
  for (const auto& st : stations) {
    const Segment& seg = prob.net->segments[st.seg_id];
    FdSolution::StationValue v;
    v.seg_id = st.seg_id;
    v.position = prob.net->segment_point(st.seg_id, st.arc_t);
    v.c = prob.params.L_cap * prob.params.rho_int * st.surface_weight;
    v.i_pv = st.interp_n1 * node_pressure[seg.n1] + st.interp_n2 * node_pressure[seg.n2];
    v.pt_bar = circle_average(tissue_pressure, st.stencil);
    out.push_back(v);
  }
  return out;
}

FdSolution solve_fd(const FdProblem& prob, const SolveOptions& opts) {
  if (prob.params.L_cap == 0.0)
    throw SingularSystemError(
        "solve_fd: L_cap = 0 decouples the tissue block into a pure-Neumann problem with a "
        "constant nullspace; the network part alone is a plain graph solve");

  FdSystem sys = assemble_fd(prob);
  FdSolution sol;
  std::vector<double> x = solve(sys.A, sys.rhs, opts, &sol.stats);

  sol.tissue_pressure.assign(x.begin(), x.begin() + sys.n_cells);
  sol.node_pressure.assign(prob.net->nodes.size(), 0.0);
  for (const auto& nd : prob.net->nodes)
    sol.node_pressure[nd.id] = nd.kind == NodeKind::boundary
                                   ? *nd.boundary_pressure
                                   : x[sys.network_index(nd.id)];

  // Audit: net boundary inflow and total wall exchange.
  double net_boundary = 0.0;
  for (const auto& nd : prob.net->nodes) {
    if (nd.kind != NodeKind::boundary) continue;
    int sid = prob.net->adjacency[nd.id].front();
    const Segment& s = prob.net->segments[sid];
    double g = vgm_conductance(s, prob.params.rho_bl);
    int other = prob.net->other_end(sid, nd.id);
    net_boundary += g * (sol.node_pressure[nd.id] - sol.node_pressure[other]);
  }
  sol.boundary_net_flux = net_boundary;

  sol.station_values = evaluate_stations(prob, sys.stations, sol.tissue_pressure,
                                         sol.node_pressure);
  double gap = prob.params.oncotic_gap();
  double q_total = 0.0;
  for (const auto& v : sol.station_values) q_total += v.c * (v.i_pv - v.pt_bar - gap);
  sol.wall_exchange_total = q_total;
  return sol;
}

}  // namespace mvf
