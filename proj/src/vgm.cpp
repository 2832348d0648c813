#include "mvf/vgm.hpp"

#include <cmath>
#include <queue>

#include "mvf/errors.hpp"

namespace mvf {

VgmSystem assemble_vgm(const VascularNetwork& net, const std::set<int>& active_segments,
                       const std::map<int, double>& dirichlet, double rho,
                       const WallExchangeSpec* wall, bool drop_unreachable) {
  VgmSystem sys;
  sys.net = &net;
  sys.rho = rho;
  sys.segment_active.assign(net.segments.size(), 0);
  sys.node_active.assign(net.nodes.size(), 0);
  for (int sid : active_segments) {
    sys.segment_active.at(sid) = 1;
    sys.node_active[net.segments[sid].n1] = 1;
    sys.node_active[net.segments[sid].n2] = 1;
  }
  for (auto [nid, p] : dirichlet)
    if (sys.node_active.at(nid)) sys.dirichlet[nid] = p;

  // Reachability from Dirichlet nodes over active segments.
  std::vector<char> reachable(net.nodes.size(), 0);
  std::queue<int> bfs;
  for (const auto& kv : sys.dirichlet) {
    reachable[kv.first] = 1;
    bfs.push(kv.first);
  }
  while (!bfs.empty()) {
    int u = bfs.front();
    bfs.pop();
    for (int sid : net.adjacency[u]) {
      if (!sys.segment_active[sid]) continue;
      int v = net.other_end(sid, u);
      if (!reachable[v]) {
        reachable[v] = 1;
        bfs.push(v);
      }
    }
  }
  for (size_t i = 0; i < net.nodes.size(); ++i) {
    if (sys.node_active[i] && !reachable[i]) {
      if (!drop_unreachable)
        throw SingularSystemError("VGM: node " + std::to_string(i) +
                                  " cannot reach any Dirichlet node");
      sys.node_active[i] = 0;
    }
  }
  if (drop_unreachable)
    for (size_t s = 0; s < net.segments.size(); ++s)
      if (sys.segment_active[s] &&
          (!sys.node_active[net.segments[s].n1] || !sys.node_active[net.segments[s].n2]))
        sys.segment_active[s] = 0;
  if (sys.dirichlet.empty())
    throw SingularSystemError("VGM: no Dirichlet node in the active subgraph");

  sys.unknown_of_node.assign(net.nodes.size(), -1);
  for (size_t i = 0; i < net.nodes.size(); ++i) {
    if (sys.node_active[i] && !sys.dirichlet.count(static_cast<int>(i))) {
      sys.unknown_of_node[i] = static_cast<int>(sys.node_of_unknown.size());
      sys.node_of_unknown.push_back(static_cast<int>(i));
    }
  }

  int n = static_cast<int>(sys.node_of_unknown.size());
  sys.A = SparseMatrix(n);
  sys.rhs.assign(n, 0.0);

  for (size_t sid = 0; sid < net.segments.size(); ++sid) {
    if (!sys.segment_active[sid]) continue;
    const Segment& s = net.segments[sid];
    double g = vgm_conductance(s, rho);
    int ends[2] = {s.n1, s.n2};
    for (int e = 0; e < 2; ++e) {
      int k = ends[e], j = ends[1 - e];
      int row = sys.unknown_of_node[k];
      if (row < 0) continue;
      sys.A.add(row, row, g);
      int col = sys.unknown_of_node[j];
      if (col >= 0)
        sys.A.add(row, col, -g);
      else
        sys.rhs[row] += g * sys.dirichlet.at(j);
    }
  }

  if (wall && wall->L_cap != 0.0) {
    if (!wall->grid || !wall->tissue_pressure || !wall->capillary_ids)
      throw ValidationError("VGM wall exchange: missing grid, field or segment set");
    auto stations = build_wall_stations(net, *wall->capillary_ids, *wall->grid, wall->n_theta,
                                        wall->n_quad_per_half);
    for (const auto& st : stations) {
      if (!sys.segment_active[st.seg_id] || st.owner_node < 0) continue;
      int row = sys.unknown_of_node[st.owner_node];
      if (row < 0) continue;
      const Segment& s = net.segments[st.seg_id];
      double c = wall->L_cap * wall->rho_int * st.surface_weight;
      double pt_bar = circle_average(*wall->tissue_pressure, st.stencil);
      // + c (I(p^v) - pt_bar - oncotic_gap) on the balance row
      int ends[2] = {s.n1, s.n2};
      double coef[2] = {c * st.interp_n1, c * st.interp_n2};
      for (int e = 0; e < 2; ++e) {
        int col = sys.unknown_of_node[ends[e]];
        if (col >= 0)
          sys.A.add(row, col, coef[e]);
        else
          sys.rhs[row] -= coef[e] * sys.dirichlet.at(ends[e]);
      }
      sys.rhs[row] += c * (pt_bar + wall->oncotic_gap);
    }
  }

  sys.A.finalize();
  return sys;
}

VgmSystem assemble_vgm(const VascularNetwork& net, const std::set<int>& active_segments,
                       double rho, const WallExchangeSpec* wall) {
  std::map<int, double> dirichlet;
  for (const auto& nd : net.nodes)
    if (nd.kind == NodeKind::boundary) dirichlet[nd.id] = *nd.boundary_pressure;
  return assemble_vgm(net, active_segments, dirichlet, rho, wall, false);
}

VgmSolution solve_vgm(const VgmSystem& sys, const SolveOptions& opts) {
  VgmSolution sol;
  sol.node_pressure.assign(sys.net->nodes.size(), std::nan(""));
  sol.node_solved.assign(sys.net->nodes.size(), 0);
  std::vector<double> x = solve(sys.A, sys.rhs, opts, &sol.stats);
  for (size_t u = 0; u < sys.node_of_unknown.size(); ++u) {
    sol.node_pressure[sys.node_of_unknown[u]] = x[u];
    sol.node_solved[sys.node_of_unknown[u]] = 1;
  }
  for (auto [nid, p] : sys.dirichlet) {
    sol.node_pressure[nid] = p;
    sol.node_solved[nid] = 1;
  }
  return sol;
}

double edge_flux(const VgmSystem& sys, const VgmSolution& sol, int seg_id) {
  const Segment& s = sys.net->segments.at(seg_id);
  if (!sys.segment_active[seg_id]) throw Error("edge_flux: inactive segment");
  double g = vgm_conductance(s, sys.rho);
  return g * (sol.node_pressure[s.n1] - sol.node_pressure[s.n2]);
}

double permeability_experiment(const VascularNetwork& net, const std::set<int>& member_ids,
                               const Box3& box, int axis, double p_in, double p_out,
                               double eps_d, const SolveOptions& opts) {
  if (member_ids.empty()) throw InfeasibleError("permeability experiment: empty subnetwork");
  if (p_in == p_out)
    throw ValidationError("permeability experiment: need distinct facet pressures");

  std::set<int> sub_nodes;
  for (int sid : member_ids) {
    sub_nodes.insert(net.segments.at(sid).n1);
    sub_nodes.insert(net.segments.at(sid).n2);
  }
  std::map<int, double> dirichlet;
  std::vector<int> outlet_nodes;
  for (int nid : sub_nodes) {
    const Vec3& p = net.nodes[nid].position;
    bool on_in = dist_to_face_rect(p, axis, box.lo[axis], box) < eps_d;
    bool on_out = dist_to_face_rect(p, axis, box.hi[axis], box) < eps_d;
    if (on_in && on_out)
      throw ValidationError("permeability experiment: node matches both facets");
    if (on_in) dirichlet[nid] = p_in;
    if (on_out) {
      dirichlet[nid] = p_out;
      outlet_nodes.push_back(nid);
    }
  }
  bool any_in = false;
  for (const auto& kv : dirichlet) any_in |= (kv.second == p_in);
  if (!any_in || outlet_nodes.empty())
    throw InfeasibleError("permeability experiment: a facet has no subnetwork nodes");

  VgmSystem sys =
      assemble_vgm(net, member_ids, dirichlet, /*rho=*/1.0, nullptr, /*drop_unreachable=*/true);
  VgmSolution sol = solve_vgm(sys, opts);

  double vf_out = 0.0;
  for (int o : outlet_nodes) {
    for (int sid : net.adjacency[o]) {
      if (!sys.segment_active[sid]) continue;
      int m = net.other_end(sid, o);
      if (!sol.node_solved[m]) continue;
      // Volumetric flux arriving at the outlet along the edge: pi R^2 K_v / mu * dp/ds.
      double g = vgm_conductance(net.segments[sid], 1.0);
      vf_out += g * (sol.node_pressure[m] - sol.node_pressure[o]);
    }
  }
  return vf_out;
}

}  // namespace mvf
