#include "mvf/hybrid_model.hpp"

#include <cmath>

#include "mvf/errors.hpp"
#include "mvf/vgm.hpp"

namespace mvf {

double coupling_coefficient(double terminal_radius, double alpha, const RevCoefficients& rev,
                            double rho_bl) {
  return rho_bl * M_PI * terminal_radius * terminal_radius * alpha * rev.Kv_bar /
         (rev.mu_up * rev.L_min);
}

HybridSystem assemble_hybrid(const HybridProblem& prob) {
  if (!prob.net) throw ValidationError("assemble_hybrid: missing network");
  if (prob.alpha < 0.0 || prob.alpha >= 1.0)
    throw ValidationError("assemble_hybrid: alpha must lie in (0,1)");
  const VascularNetwork& net = *prob.net;

  HybridSystem sys;
  sys.prob = &prob;
  sys.n_cells = prob.grid.num_cells();
  sys.n_rev = static_cast<int>(prob.dec.revs.size());
  if (static_cast<int>(prob.coeffs.size()) != sys.n_rev)
    throw ValidationError("assemble_hybrid: REV coefficients do not match the decomposition");

  // Large-vessel subgraph nodes and Dirichlet set.
  std::vector<char> lv_node(net.nodes.size(), 0);
  std::vector<int> lv_degree(net.nodes.size(), 0);
  for (int sid : prob.I_L) {
    const Segment& s = net.segments.at(sid);
    lv_node[s.n1] = lv_node[s.n2] = 1;
    lv_degree[s.n1]++;
    lv_degree[s.n2]++;
  }
  sys.unknown_of_node.assign(net.nodes.size(), -1);
  bool any_dirichlet = false;
  for (const auto& nd : net.nodes) {
    if (!lv_node[nd.id]) continue;
    if (nd.kind == NodeKind::boundary) {
      any_dirichlet = true;
      continue;
    }
    sys.unknown_of_node[nd.id] = static_cast<int>(sys.node_of_unknown.size());
    sys.node_of_unknown.push_back(nd.id);
  }
  sys.n_v = static_cast<int>(sys.node_of_unknown.size());
  if (!prob.I_L.empty() && !any_dirichlet)
    throw SingularSystemError("assemble_hybrid: large-vessel subgraph has no Dirichlet node");

  sys.A = SparseMatrix(sys.dim());
  sys.rhs.assign(sys.dim(), 0.0);
  auto dirichlet_value = [&](int node) { return *net.nodes[node].boundary_pressure; };

  // Network rows on the large-vessel subgraph.
  for (int sid : prob.I_L) {
    const Segment& s = net.segments.at(sid);
    double g = vgm_conductance(s, prob.params.rho_bl);
    int ends[2] = {s.n1, s.n2};
    for (int e = 0; e < 2; ++e) {
      int k = ends[e], j = ends[1 - e];
      if (sys.unknown_of_node[k] < 0) continue;
      int row = sys.v_index(k);
      sys.A.add(row, row, g);
      if (sys.unknown_of_node[j] >= 0)
        sys.A.add(row, sys.v_index(j), -g);
      else
        sys.rhs[row] += g * dirichlet_value(j);
    }
  }

  // Capillary continuum block: per-REV mobility, Dirichlet boundary field.
  {
    DarcyProblem cap;
    cap.grid = prob.grid;
    cap.mobility.resize(sys.n_cells);
    for (int c = 0; c < sys.n_cells; ++c) {
      const RevCoefficients& rc = prob.coeffs[prob.dec.rev_of_cell(prob.grid, c)];
      double f = prob.params.rho_bl / rc.mu_up;
      cap.mobility[c] = {f * rc.k_up.x, f * rc.k_up.y, f * rc.k_up.z};
    }
    for (int plane = 0; plane < 6; ++plane) {
      cap.boundary[plane].kind = BoundaryKind::dirichlet;
      cap.boundary[plane].value = [&field = prob.p_cap_boundary, plane](const Vec3& p) {
        return field.evaluate(plane, p);
      };
    }
    assemble_darcy_into(cap, sys.A, sys.rhs, sys.cap_index(0));
  }

  // Tissue continuum block: no-flow everywhere.
  {
    DarcyProblem tis;
    tis.grid = prob.grid;
    double mob = prob.params.rho_int * prob.params.K_t / prob.params.mu_int;
    tis.mobility.assign(sys.n_cells, Vec3{mob, mob, mob});
    assemble_darcy_into(tis, sys.A, sys.rhs, sys.tissue_index(0));
  }

  // Auxiliary REV-average definitions: p_aux_j - mean(p_cap over REV cells) = 0,
  // scaled by a typical REV transmissibility so the row carries the same
  // mass-flux units as every other equation.
  for (const auto& rev : prob.dec.revs) {
    const RevCoefficients& rc = prob.coeffs[rev.id];
    double row_scale = prob.grid.face_area(0) * prob.params.rho_bl * rc.k_up.x /
                       (rc.mu_up * prob.grid.spacing(0));
    int row = sys.aux_index(rev.id);
    sys.A.add(row, row, row_scale);
    double w = -row_scale / static_cast<double>(rev.cell_count());
    for (int k = rev.cell_lo[2]; k <= rev.cell_hi[2]; ++k)
      for (int j = rev.cell_lo[1]; j <= rev.cell_hi[1]; ++j)
        for (int i = rev.cell_lo[0]; i <= rev.cell_hi[0]; ++i)
          sys.A.add(row, sys.cap_index(prob.grid.flat(i, j, k)), w);
  }

  // Terminal coupling q_v: spread uniformly over the terminal's REV.
  for (const auto& rev : prob.dec.revs) {
    for (int nid : rev.large_terminal_node_ids) {
      if (net.nodes[nid].kind != NodeKind::interior)
        throw ValidationError("assemble_hybrid: terminal node is a boundary node");
      if (lv_degree[nid] != 1) continue;  // coupling only at degree-1 ends of the LV subgraph
      TerminalCoupling tc;
      tc.node = nid;
      tc.rev = rev.id;
      for (int sid : net.adjacency[nid])
        if (prob.I_L.count(sid)) tc.lv_segment = sid;
      tc.radius = net.segments[tc.lv_segment].radius;
      double a_unit = coupling_coefficient(tc.radius, prob.alpha, prob.coeffs[rev.id],
                                           prob.params.rho_bl);

      CouplingAudit audit;
      int vcol = sys.v_index(nid);
      int acol = sys.aux_index(rev.id);
      double n_inv = 1.0 / static_cast<double>(rev.cell_count());
      double sum_v = 0.0, sum_a = 0.0;
      for (int k = rev.cell_lo[2]; k <= rev.cell_hi[2]; ++k)
        for (int j = rev.cell_lo[1]; j <= rev.cell_hi[1]; ++j)
          for (int i = rev.cell_lo[0]; i <= rev.cell_hi[0]; ++i) {
            int row = sys.cap_index(prob.grid.flat(i, j, k));
            double vv = -(a_unit * n_inv);
            double va = a_unit * n_inv;
            sys.A.add(row, vcol, vv);
            sys.A.add(row, acol, va);
            audit.spread.emplace_back(row, vcol, vv);
            audit.spread.emplace_back(row, acol, va);
            sum_v += vv;
            sum_a += va;
          }
      int brow = sys.v_index(nid);
      sys.A.add(brow, vcol, -sum_v);
      sys.A.add(brow, acol, -sum_a);
      audit.balance.emplace_back(brow, vcol, -sum_v);
      audit.balance.emplace_back(brow, acol, -sum_a);
      tc.alpha_v_cap = -sum_v;
      sys.terminals.push_back(tc);
      sys.qv_audits.push_back(std::move(audit));
    }
  }

  // Starling bulk exchange q_t between the two continua, cell by cell.
  if (prob.params.L_cap != 0.0) {
    double gap = prob.params.oncotic_gap();
    double vol = prob.grid.cell_volume();
    for (int c = 0; c < sys.n_cells; ++c) {
      const RevCoefficients& rc = prob.coeffs[prob.dec.rev_of_cell(prob.grid, c)];
      double rev_volume = prob.dec.revs[rc.rev_id].cell_count() * vol;
      double e = vol * prob.params.rho_int * rc.surface_area * prob.params.L_cap / rev_volume;
      int cap_row = sys.cap_index(c), tis_row = sys.tissue_index(c);
      CouplingAudit audit;
      sys.A.add(cap_row, sys.tissue_index(c), -e);
      sys.A.add(cap_row, sys.cap_index(c), e);
      sys.rhs[cap_row] += e * gap;
      audit.spread.emplace_back(cap_row, sys.tissue_index(c), -e);
      audit.spread.emplace_back(cap_row, sys.cap_index(c), e);
      audit.spread_rhs.push_back(e * gap);
      sys.A.add(tis_row, sys.tissue_index(c), e);
      sys.A.add(tis_row, sys.cap_index(c), -e);
      sys.rhs[tis_row] -= e * gap;
      audit.balance.emplace_back(tis_row, sys.tissue_index(c), e);
      audit.balance.emplace_back(tis_row, sys.cap_index(c), -e);
      audit.balance_rhs = -(e * gap);
      sys.qt_audits.push_back(std::move(audit));
    }
  }

  sys.A.finalize();
  return sys;
}

HybridSolution solve_hybrid(const HybridProblem& prob, const SolveOptions& opts) {
  if (prob.params.L_cap == 0.0)
    throw SingularSystemError(
        "solve_hybrid: L_cap = 0 decouples the tissue block into a pure-Neumann problem "
        "with a constant nullspace");
  HybridSystem sys = assemble_hybrid(prob);

  HybridSolution sol;
  std::vector<double> x = solve(sys.A, sys.rhs, opts, &sol.stats);

  const VascularNetwork& net = *prob.net;
  sol.node_pressure.assign(net.nodes.size(), std::nan(""));
  sol.node_solved.assign(net.nodes.size(), 0);
  for (int u = 0; u < sys.n_v; ++u) {
    sol.node_pressure[sys.node_of_unknown[u]] = x[u];
    sol.node_solved[sys.node_of_unknown[u]] = 1;
  }
  for (const auto& nd : net.nodes) {
    if (nd.kind == NodeKind::boundary) {
      bool lv = false;
      for (int sid : net.adjacency[nd.id]) lv |= prob.I_L.count(sid) > 0;
      if (lv) {
        sol.node_pressure[nd.id] = *nd.boundary_pressure;
        sol.node_solved[nd.id] = 1;
      }
    }
  }
  sol.cap_pressure.assign(x.begin() + sys.cap_index(0), x.begin() + sys.cap_index(0) + sys.n_cells);
  sol.tissue_pressure.assign(x.begin() + sys.tissue_index(0),
                             x.begin() + sys.tissue_index(0) + sys.n_cells);
  sol.rev_cap_average.assign(x.begin() + sys.aux_index(0), x.end());
  sol.terminals = sys.terminals;

  for (const auto& tc : sys.terminals)
    sol.terminal_transfer_total +=
        tc.alpha_v_cap * (sol.node_pressure[tc.node] - sol.rev_cap_average[tc.rev]);

  double gap = prob.params.oncotic_gap();
  double vol = prob.grid.cell_volume();
  double qt = 0.0;
  for (int c = 0; c < sys.n_cells; ++c) {
    const RevCoefficients& rc = prob.coeffs[prob.dec.rev_of_cell(prob.grid, c)];
    double rev_volume = prob.dec.revs[rc.rev_id].cell_count() * vol;
    double e = vol * prob.params.rho_int * rc.surface_area * prob.params.L_cap / rev_volume;
    qt += e * (sol.tissue_pressure[c] - sol.cap_pressure[c] + gap);
  }
  sol.qt_total = qt;
  return sol;
}

}  // namespace mvf
