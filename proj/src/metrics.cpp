#include "mvf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mvf/errors.hpp"
#include "mvf/vgm.hpp"

namespace mvf {

NodeFlux node_mass_flux(const VascularNetwork& net, const std::vector<double>& node_pressure,
                        double rho_bl, int node_id) {
  const NetworkNode& nd = net.node(node_id);
  if (nd.kind != NodeKind::boundary)
    throw ValidationError("node_mass_flux: node " + std::to_string(node_id) +
                          " is not a boundary node");
  int sid = net.adjacency[node_id].front();
  const Segment& s = net.segments[sid];
  int other = net.other_end(sid, node_id);
  double g = vgm_conductance(s, rho_bl);
  NodeFlux f;
  f.mf = g * (node_pressure[node_id] - node_pressure[other]);
  f.mf_in = f.mf > 0.0 ? f.mf : 0.0;
  f.mf_out = f.mf < 0.0 ? -f.mf : 0.0;
  return f;
}

DarcyProblem capillary_darcy_problem(const UniformGrid& grid, const RevDecomposition& dec,
                                     const std::vector<RevCoefficients>& coeffs, double rho_bl,
                                     const BoundaryField& field) {
  DarcyProblem cap;
  cap.grid = grid;
  cap.mobility.resize(grid.num_cells());
  for (int c = 0; c < grid.num_cells(); ++c) {
    const RevCoefficients& rc = coeffs[dec.rev_of_cell(grid, c)];
    double f = rho_bl / rc.mu_up;
    cap.mobility[c] = {f * rc.k_up.x, f * rc.k_up.y, f * rc.k_up.z};
  }
  for (int plane = 0; plane < 6; ++plane) {
    cap.boundary[plane].kind = BoundaryKind::dirichlet;
    cap.boundary[plane].value = [field, plane](const Vec3& p) { return field.evaluate(plane, p); };
  }
  return cap;
}

RevFlux rev_net_flux(const DarcyProblem& cap_problem, const RevDecomposition& dec,
                     const std::vector<double>& cap_pressure, int rev_id) {
  const UniformGrid& grid = cap_problem.grid;
  const RevBox& rev = dec.revs.at(rev_id);
  bool touches = false;
  for (int ax = 0; ax < 3; ++ax)
    touches |= rev.cell_lo[ax] == 0 || rev.cell_hi[ax] == grid.n[ax] - 1;
  if (!touches)
    throw ValidationError("rev_net_flux: REV " + std::to_string(rev_id) +
                          " does not touch the domain boundary");
  double net_flux = 0.0;
  for (const auto& face : boundary_faces(grid)) {
    if (dec.rev_of_cell(grid, face.cell) != rev_id) continue;
    net_flux += face_flux(cap_problem, cap_pressure, face);
  }
  return rectify(rev_id, net_flux);
}

RevFlux fd_rev_capillary_flux(const VascularNetwork& net, const std::vector<double>& node_pressure,
                              double rho_bl, const std::set<int>& I_C, const UniformGrid& grid,
                              const RevDecomposition& dec, int rev_id) {
  double sum = 0.0;
  for (const auto& nd : net.nodes) {
    if (nd.kind != NodeKind::boundary) continue;
    int sid = net.adjacency[nd.id].front();
    if (!I_C.count(sid)) continue;
    if (dec.rev_of_cell(grid, grid.cell_of_flat(nd.position)) != rev_id) continue;
    sum += node_mass_flux(net, node_pressure, rho_bl, nd.id).mf;
  }
  return rectify(rev_id, sum);
}

namespace {

bool rev_on_boundary(const RevDecomposition& dec, const UniformGrid& grid, int rev_id) {
  const RevBox& rev = dec.revs[rev_id];
  for (int ax = 0; ax < 3; ++ax)
    if (rev.cell_lo[ax] == 0 || rev.cell_hi[ax] == grid.n[ax] - 1) return true;
  return false;
}

}  // namespace

std::vector<RevFlux> cap_tissue_exchange_fd(const FdProblem& prob, const FdSolution& sol,
                                            const RevDecomposition& dec) {
  double gap = prob.params.oncotic_gap();
  std::vector<double> net_by_rev(dec.revs.size(), 0.0);
  for (const auto& sv : sol.station_values) {
    int rev = dec.rev_of_cell(prob.grid, prob.grid.cell_of_flat(sv.position));
    net_by_rev[rev] += sv.c * ((sv.pt_bar - sv.i_pv) - gap);
  }
  std::vector<RevFlux> out;
  for (size_t j = 0; j < net_by_rev.size(); ++j)
    out.push_back(rectify(static_cast<int>(j), net_by_rev[j]));
  return out;
}

std::vector<RevFlux> cap_tissue_exchange_hybrid(const HybridProblem& prob,
                                                const HybridSolution& sol) {
  double gap = prob.params.oncotic_gap();
  double vol = prob.grid.cell_volume();
  std::vector<RevFlux> out;
  for (const auto& rev : prob.dec.revs) {
    const RevCoefficients& rc = prob.coeffs[rev.id];
    double rev_volume = rev.cell_count() * vol;
    double coef = prob.params.rho_int * prob.params.L_cap * rc.surface_area / rev_volume;
    double integral = 0.0;
    for (int k = rev.cell_lo[2]; k <= rev.cell_hi[2]; ++k)
      for (int j = rev.cell_lo[1]; j <= rev.cell_hi[1]; ++j)
        for (int i = rev.cell_lo[0]; i <= rev.cell_hi[0]; ++i) {
          int c = prob.grid.flat(i, j, k);
          integral += vol * ((sol.tissue_pressure[c] - sol.cap_pressure[c]) - gap);
        }
    out.push_back(rectify(rev.id, coef * integral));
  }
  return out;
}

FluxReport flux_report_fd(const FdProblem& prob, const FdSolution& sol,
                          const RevDecomposition& dec, const std::set<int>& I_L,
                          const std::set<int>& I_C) {
  const VascularNetwork& net = *prob.net;
  FluxReport rep;
  for (const auto& nd : net.nodes) {
    if (nd.kind != NodeKind::boundary) continue;
    int sid = net.adjacency[nd.id].front();
    if (!I_L.count(sid)) continue;
    NodeFlux f = node_mass_flux(net, sol.node_pressure, prob.params.rho_bl, nd.id);
    rep.mf_lv_in += f.mf_in;
    rep.mf_lv_out += f.mf_out;
  }
  for (size_t j = 0; j < dec.revs.size(); ++j) {
    if (!rev_on_boundary(dec, prob.grid, static_cast<int>(j))) continue;
    RevFlux rf = fd_rev_capillary_flux(net, sol.node_pressure, prob.params.rho_bl, I_C,
                                       prob.grid, dec, static_cast<int>(j));
    rep.rev_boundary.push_back(rf);
    rep.mf_cap_in += rf.in;
    rep.mf_cap_out += rf.out;
  }
  rep.rev_exchange = cap_tissue_exchange_fd(prob, sol, dec);
  for (const auto& rf : rep.rev_exchange) {
    rep.mf_cap_t_in += rf.in;
    rep.mf_cap_t_out += rf.out;
    rep.mf_cap_t_net += rf.net;
  }
  return rep;
}

FluxReport flux_report_hybrid(const HybridProblem& prob, const HybridSolution& sol) {
  const VascularNetwork& net = *prob.net;
  FluxReport rep;
  for (const auto& nd : net.nodes) {
    if (nd.kind != NodeKind::boundary) continue;
    int sid = net.adjacency[nd.id].front();
    if (!prob.I_L.count(sid)) continue;
    NodeFlux f = node_mass_flux(net, sol.node_pressure, prob.params.rho_bl, nd.id);
    rep.mf_lv_in += f.mf_in;
    rep.mf_lv_out += f.mf_out;
  }
  DarcyProblem cap = capillary_darcy_problem(prob.grid, prob.dec, prob.coeffs,
                                             prob.params.rho_bl, prob.p_cap_boundary);
  for (size_t j = 0; j < prob.dec.revs.size(); ++j) {
    if (!rev_on_boundary(prob.dec, prob.grid, static_cast<int>(j))) continue;
    RevFlux rf = rev_net_flux(cap, prob.dec, sol.cap_pressure, static_cast<int>(j));
    rep.rev_boundary.push_back(rf);
    rep.mf_cap_in += rf.in;
    rep.mf_cap_out += rf.out;
  }
  rep.rev_exchange = cap_tissue_exchange_hybrid(prob, sol);
  for (const auto& rf : rep.rev_exchange) {
    rep.mf_cap_t_in += rf.in;
    rep.mf_cap_t_out += rf.out;
    rep.mf_cap_t_net += rf.net;
  }
  return rep;
}

std::vector<RevPressureRow> rev_pressures(const VascularNetwork& net, const UniformGrid& grid,
                                          const RevDecomposition& dec, const std::set<int>& I_C,
                                          const HybridSolution& hy, const FdSolution& fd) {
  std::vector<RevPressureRow> rows;
  for (const auto& rev : dec.revs) {
    RevPressureRow r;
    r.rev_id = rev.id;
    r.center = rev.box.center();
    double n_cells = static_cast<double>(rev.cell_count());

    double cap_hy = 0.0, t_hy = 0.0, t_fd = 0.0;
    for (int k = rev.cell_lo[2]; k <= rev.cell_hi[2]; ++k)
      for (int j = rev.cell_lo[1]; j <= rev.cell_hi[1]; ++j)
        for (int i = rev.cell_lo[0]; i <= rev.cell_hi[0]; ++i) {
          int c = grid.flat(i, j, k);
          cap_hy += hy.cap_pressure[c];
          t_hy += hy.tissue_pressure[c];
          t_fd += fd.tissue_pressure[c];
        }
    r.p_cap_hy = cap_hy / n_cells;
    r.p_t_hy = t_hy / n_cells;
    r.p_t_fd = t_fd / n_cells;

    // FD capillary average: length-weighted mean of the piecewise-linear
    // network pressure over the clipped member sub-segments.
    double len_total = 0.0, weighted = 0.0;
    for (int sid : rev.capillary_segment_ids) {
      if (!I_C.count(sid)) continue;
      const Segment& s = net.segments[sid];
      auto [t0, t1] = clip_segment_box(net.nodes[s.n1].position, net.nodes[s.n2].position,
                                       rev.box);
      if (t1 <= t0) continue;
      double len = (t1 - t0) * s.length;
      double tm = 0.5 * (t0 + t1);
      double pmid = (1.0 - tm) * fd.node_pressure[s.n1] + tm * fd.node_pressure[s.n2];
      len_total += len;
      weighted += len * pmid;
    }
    if (len_total <= 0.0)
      throw ValidationError("rev_pressures: REV " + std::to_string(rev.id) +
                            " has no clipped capillary length");
    r.p_cap_fd = weighted / len_total;

    r.e_r_cap = std::abs(r.p_cap_hy - r.p_cap_fd) / r.p_cap_hy;
    r.e_r_t = std::abs(r.p_t_hy - r.p_t_fd) / r.p_t_hy;
    rows.push_back(r);
  }
  return rows;
}

double objective_f1(const FluxReport& hy, const FluxReport& fd) {
  double acc = 0.0;
  double d;
  d = hy.mf_lv_in - fd.mf_lv_in;
  acc += 0.5 * d * d;
  d = hy.mf_lv_out - fd.mf_lv_out;
  acc += 0.5 * d * d;
  d = hy.mf_cap_in - fd.mf_cap_in;
  acc += 0.5 * d * d;
  d = hy.mf_cap_out - fd.mf_cap_out;
  acc += 0.5 * d * d;
  return std::sqrt(acc);
}

double objective_f2(const FluxReport& hy, const FluxReport& fd) {
  double d = hy.mf_lv_in - fd.mf_lv_in;
  return std::sqrt(0.5 * d * d);
}

AlphaScanResult calibrate_alpha(const std::function<FluxReport(double)>& hybrid_report,
                                const FluxReport& fd_report, std::vector<double> alpha_grid) {
  if (alpha_grid.empty()) throw ValidationError("calibrate_alpha: empty alpha grid");
  std::sort(alpha_grid.begin(), alpha_grid.end());
  AlphaScanResult res;
  double best1 = std::numeric_limits<double>::infinity();
  double best2 = best1;
  for (double a : alpha_grid) {
    FluxReport hy = hybrid_report(a);
    AlphaScanRow row{a, objective_f1(hy, fd_report), objective_f2(hy, fd_report)};
    res.rows.push_back(row);
    if (row.f1 < best1) {
      best1 = row.f1;
      res.argmin_f1 = a;
    }
    if (row.f2 < best2) {
      best2 = row.f2;
      res.argmin_f2 = a;
    }
  }
  return res;
}

double boundary_pressure_delta(const VascularNetwork& net, const std::set<int>& I_L) {
  double sum_a = 0.0, sum_v = 0.0;
  int n_a = 0, n_v = 0;
  for (const auto& nd : net.nodes) {
    if (nd.kind != NodeKind::boundary) continue;
    if (!I_L.count(net.adjacency[nd.id].front())) continue;
    if (nd.vessel_class == VesselClass::arterial) {
      sum_a += *nd.boundary_pressure;
      ++n_a;
    } else if (nd.vessel_class == VesselClass::venous) {
      sum_v += *nd.boundary_pressure;
      ++n_v;
    } else {
      throw ValidationError("boundary_pressure_delta: large-vessel boundary node " +
                            std::to_string(nd.id) + " is not labeled arterial or venous");
    }
  }
  if (n_a == 0 || n_v == 0)
    throw ValidationError("boundary_pressure_delta: need both arterial and venous nodes");
  return std::abs(sum_v / n_v - sum_a / n_a);
}

VascularNetwork shift_boundary_pressures(const VascularNetwork& net, const std::set<int>& I_L,
                                         double fraction, const RheologyParams& rheology) {
  double delta = boundary_pressure_delta(net, I_L);
  VascularNetwork out = net;
  for (auto& nd : out.nodes) {
    if (nd.kind != NodeKind::boundary) continue;
    if (!I_L.count(out.adjacency[nd.id].front())) continue;
    if (nd.vessel_class == VesselClass::arterial)
      nd.boundary_pressure = *nd.boundary_pressure + 0.5 * delta * fraction;
    else if (nd.vessel_class == VesselClass::venous)
      nd.boundary_pressure = *nd.boundary_pressure - 0.5 * delta * fraction;
  }
  out.finalize(rheology);
  return out;
}

std::vector<SensitivityRow> boundary_sensitivity(
    const VascularNetwork& net, const std::set<int>& I_L, const RheologyParams& rheology,
    const std::vector<double>& fractions, const std::vector<double>& alpha_grid,
    const std::function<FluxReport(const VascularNetwork&)>& fd_reference,
    const std::function<FluxReport(const VascularNetwork&, double)>& hybrid_report) {
  double delta = boundary_pressure_delta(net, I_L);
  std::vector<SensitivityRow> rows;
  for (double frac : fractions) {
    VascularNetwork shifted = shift_boundary_pressures(net, I_L, frac, rheology);
    FluxReport fd = fd_reference(shifted);
    auto hy = [&](double a) { return hybrid_report(shifted, a); };
    AlphaScanResult scan = calibrate_alpha(hy, fd, alpha_grid);
    rows.push_back({frac, scan.argmin_f2, delta});
  }
  return rows;
}

}  // namespace mvf
