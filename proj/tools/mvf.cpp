#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mvf/io.hpp"
#include "mvf/pipeline.hpp"

namespace fs = std::filesystem;
using namespace mvf;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

std::string out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output_dir);
  return (fs::path(cfg.output_dir) / name).string();
}

void finish(const RunConfig& cfg, const std::string& command, const Timer& timer,
            const std::vector<std::string>& outputs) {
  write_manifest(out_path(cfg, command + "_manifest.json"), cfg, command, timer.seconds(),
                 outputs);
  for (const auto& f : outputs) std::cout << "wrote " << f << "\n";
}

int cmd_net_info(const RunConfig& cfg) {
  ModelSetup ws = prepare(cfg);
  double rmin = 1e300, rmax = 0.0;
  for (const auto& s : ws.net.segments) {
    rmin = std::min(rmin, s.radius);
    rmax = std::max(rmax, s.radius);
  }
  int n_boundary = static_cast<int>(ws.net.boundary_node_ids().size());
  std::cout << "nodes:             " << ws.net.nodes.size() << "\n";
  std::cout << "segments:          " << ws.net.segments.size() << "\n";
  std::cout << "boundary nodes:    " << n_boundary << "\n";
  std::cout << "radius range [m]:  [" << format_double(rmin) << ", " << format_double(rmax)
            << "]\n";
  std::cout << "large vessels:     " << ws.I_L.size() << " (R >= " << format_double(cfg.R_T)
            << ")\n";
  std::cout << "capillaries:       " << ws.I_C.size() << "\n";
  std::cout << "terminals:         "
            << large_vessel_terminals(ws.net, ws.I_L, cfg.domain).size() << "\n";
  return 0;
}

int cmd_generate(const RunConfig& cfg) {
  Timer timer;
  if (!cfg.synthetic) throw ValidationError("generate: config has no synthetic section");
  LatticeSpec spec = *cfg.synthetic;
  spec.box = cfg.domain;
  VascularNetwork net = generate_synthetic(spec, cfg.seed, cfg.R_T, cfg.rheology());
  std::string net_json = out_path(cfg, "network.json");
  {
    std::ofstream out(net_json);
    out << network_to_json(net) << "\n";
  }
  std::string net_vtk = out_path(cfg, "network.vtk");
  write_vtk_network(net_vtk, net);
  finish(cfg, "generate", timer, {net_json, net_vtk});
  return 0;
}

int cmd_upscale(const RunConfig& cfg) {
  Timer timer;
  ModelSetup ws = prepare(cfg);
  prepare_hybrid(ws);
  for (const auto& c : ws.coeffs)
    for (int ax = 0; ax < 3; ++ax)
      if (c.k_floored[ax])
        std::cerr << "warning: REV " << c.rev_id << " axis " << ax
                  << " has no facet-to-facet path; permeability floored to "
                  << format_double(cfg.numerics.k_floor) << "\n";
  std::string csv = out_path(cfg, "rev_coefficients.csv");
  write_rev_coefficients(csv, ws.coeffs, ws.dec);
  finish(cfg, "upscale", timer, {csv});
  return 0;
}

int cmd_solve_fd(const RunConfig& cfg) {
  Timer timer;
  ModelSetup ws = prepare(cfg);
  FdSolution sol;
  FluxReport rep = run_fd_report(ws, &sol);
  std::string vtk = out_path(cfg, "fd_p_tissue.vtk");
  write_vtk_scalar(vtk, ws.grid, sol.tissue_pressure, "p_tissue");
  std::string pv = out_path(cfg, "fd_p_network.csv");
  write_node_pressures(pv, ws.net, sol.node_pressure);
  std::string flux = out_path(cfg, "fd_flux_report.csv");
  write_flux_report(flux, rep);
  std::cout << "conservation: |net boundary flux - wall exchange| = "
            << format_double(std::abs(sol.boundary_net_flux - sol.wall_exchange_total))
            << " kg/s\n";
  finish(cfg, "solve-fd", timer, {vtk, pv, flux});
  return 0;
}

int cmd_solve_hybrid(const RunConfig& cfg) {
  Timer timer;
  ModelSetup ws = prepare(cfg);
  prepare_hybrid(ws);
  HybridSolution sol;
  FluxReport rep = run_hybrid_report(ws, cfg.alpha, &sol);
  std::string cap_vtk = out_path(cfg, "hy_p_capillary.vtk");
  write_vtk_scalar(cap_vtk, ws.grid, sol.cap_pressure, "p_capillary");
  std::string t_vtk = out_path(cfg, "hy_p_tissue.vtk");
  write_vtk_scalar(t_vtk, ws.grid, sol.tissue_pressure, "p_tissue");
  std::string pv = out_path(cfg, "hy_p_network.csv");
  write_node_pressures(pv, ws.net, sol.node_pressure, &sol.node_solved);
  std::string flux = out_path(cfg, "hy_flux_report.csv");
  write_flux_report(flux, rep);
  CsvWriter rev_csv({"rev_id", "center_x", "center_y", "center_z", "p_cap", "p_t"});
  for (const auto& rev : ws.dec.revs) {
    double pc = sol.rev_cap_average[rev.id];
    double pt = 0.0;
    for (int k = rev.cell_lo[2]; k <= rev.cell_hi[2]; ++k)
      for (int j = rev.cell_lo[1]; j <= rev.cell_hi[1]; ++j)
        for (int i = rev.cell_lo[0]; i <= rev.cell_hi[0]; ++i)
          pt += sol.tissue_pressure[ws.grid.flat(i, j, k)];
    pt /= static_cast<double>(rev.cell_count());
    Vec3 c = rev.box.center();
    rev_csv.add_row({std::to_string(rev.id), format_double(c.x), format_double(c.y),
                     format_double(c.z), format_double(pc), format_double(pt)});
  }
  std::string rev_path = out_path(cfg, "hy_rev_pressures.csv");
  rev_csv.write(rev_path);
  finish(cfg, "solve-hybrid", timer, {cap_vtk, t_vtk, pv, flux, rev_path});
  return 0;
}

int cmd_calibrate(const RunConfig& cfg) {
  Timer timer;
  ModelSetup ws = prepare(cfg);
  prepare_hybrid(ws);
  FdSolution fd_sol;
  FluxReport fd_rep = run_fd_report(ws, &fd_sol);
  AlphaScanResult scan = calibrate_alpha(
      [&](double a) { return run_hybrid_report(ws, a); }, fd_rep, cfg.alpha_values());
  std::string scan_csv = out_path(cfg, "alpha_scan.csv");
  write_alpha_scan(scan_csv, scan);
  std::cout << "argmin f1: " << format_double(scan.argmin_f1) << "\n";
  std::cout << "argmin f2: " << format_double(scan.argmin_f2) << "\n";

  HybridSolution hy_sol;
  run_hybrid_report(ws, scan.argmin_f2, &hy_sol);
  auto rows = rev_pressures(ws.net, ws.grid, ws.dec, ws.I_C, hy_sol, fd_sol);
  std::string rev_csv = out_path(cfg, "rev_pressures.csv");
  write_rev_pressures(rev_csv, rows);
  finish(cfg, "calibrate-alpha", timer, {scan_csv, rev_csv});
  return 0;
}

int cmd_sensitivity(const RunConfig& cfg, double step_override) {
  Timer timer;
  ModelSetup base = prepare(cfg);

  std::vector<double> fractions;
  for (int i = -10; i <= 10; ++i) fractions.push_back(i / 100.0);

  AlphaGridConfig grid_cfg = cfg.alpha_grid;
  if (step_override > 0.0) grid_cfg.step = step_override;
  RunConfig scan_cfg = cfg;
  scan_cfg.alpha_grid = grid_cfg;
  std::vector<double> alphas = scan_cfg.alpha_values();

  auto fd_ref = [&](const VascularNetwork& net) {
    ModelSetup ws = prepare_with_network(cfg, net);
    return run_fd_report(ws);
  };
  auto hy_rep = [&](const VascularNetwork& net, double a) {
    ModelSetup ws = prepare_with_network(cfg, net);
    prepare_hybrid(ws);
    return run_hybrid_report(ws, a);
  };
  auto rows = boundary_sensitivity(base.net, base.I_L, cfg.rheology(), fractions, alphas,
                                   fd_ref, hy_rep);
  std::string csv = out_path(cfg, "sensitivity.csv");
  write_sensitivity(csv, rows);
  finish(cfg, "sensitivity", timer, {csv});
  return 0;
}

int cmd_rev_study(const RunConfig& cfg, std::vector<double> center,
                  std::vector<double> initial, std::vector<double> step, int steps) {
  Timer timer;
  ModelSetup ws = prepare(cfg);
  Vec3 c = center.size() == 3 ? Vec3{center[0], center[1], center[2]} : cfg.domain.center();
  Vec3 size0 = initial.size() == 3 ? Vec3{initial[0], initial[1], initial[2]}
                                   : Vec3{12e-6, 12e-6, 24e-6};
  Vec3 dstep = step.size() == 3 ? Vec3{step[0], step[1], step[2]} : Vec3{4e-6, 4e-6, 8e-6};
  UpscalingOptions opts;
  opts.dp = cfg.numerics.dp_upscale;
  opts.k_floor = cfg.numerics.k_floor;
  opts.eps_d = cfg.numerics.eps_d;
  opts.solver = cfg.solver();
  auto rows = rev_growth_study(ws.net, ws.I_C, cfg.domain, c, size0, dstep, steps, opts);
  std::string csv = out_path(cfg, "rev_growth.csv");
  write_growth_study(csv, rows);
  finish(cfg, "rev-study", timer, {csv});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Microvascular network / tissue flow simulator"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("-c,--config", config_path, "run configuration JSON")->required();

  auto* net_info = app.add_subcommand("net-info", "network summary");
  auto* generate = app.add_subcommand("generate", "write a synthetic network");
  auto* upscale = app.add_subcommand("upscale", "REV homogenization coefficients");
  auto* solve_fd_cmd = app.add_subcommand("solve-fd", "fully-discrete 3D-1D solve");
  auto* solve_hy = app.add_subcommand("solve-hybrid", "hybrid double-continuum solve");
  auto* calibrate = app.add_subcommand("calibrate-alpha", "alpha scan against the FD reference");
  auto* sensitivity = app.add_subcommand("sensitivity", "boundary-condition sensitivity of alpha");
  double sens_step = 0.0;
  sensitivity->add_option("--alpha-step", sens_step, "override alpha grid step");
  auto* rev_study = app.add_subcommand("rev-study", "REV growth stabilization study");
  std::vector<double> rs_center, rs_initial, rs_step;
  int rs_steps = 10;
  rev_study->add_option("--center", rs_center, "growth box center [m]")->expected(3);
  rev_study->add_option("--initial", rs_initial, "initial box size [m]")->expected(3);
  rev_study->add_option("--step", rs_step, "growth per step [m]")->expected(3);
  rev_study->add_option("--steps", rs_steps, "number of growth steps");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = load_config(config_path);
    if (net_info->parsed()) return cmd_net_info(cfg);
    if (generate->parsed()) return cmd_generate(cfg);
    if (upscale->parsed()) return cmd_upscale(cfg);
    if (solve_fd_cmd->parsed()) return cmd_solve_fd(cfg);
    if (solve_hy->parsed()) return cmd_solve_hybrid(cfg);
    if (calibrate->parsed()) return cmd_calibrate(cfg);
    if (sensitivity->parsed()) return cmd_sensitivity(cfg, sens_step);
    if (rev_study->parsed())
      return cmd_rev_study(cfg, rs_center, rs_initial, rs_step, rs_steps);
  } catch (const SolveError& e) {
    nlohmann::json err;
    err["error"] = "solver";
    err["message"] = e.what();
    err["residual_history_tail"] = std::vector<double>(
        e.residual_history.end() - std::min<size_t>(e.residual_history.size(), 8),
        e.residual_history.end());
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = "run_failed";
    err["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 2;
}
