#include "mvf/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mvf/errors.hpp"

namespace mvf {

using nlohmann::json;

SolveOptions RunConfig::solver() const {
  SolveOptions o;
  o.tol = numerics.solver_tol;
  o.max_iter = numerics.max_iter;
  if (numerics.preconditioner == "none")
    o.precond = Preconditioner::none;
  else if (numerics.preconditioner == "jacobi")
    o.precond = Preconditioner::jacobi;
  else if (numerics.preconditioner == "ilu0")
    o.precond = Preconditioner::ilu0;
  else
    throw ValidationError("config: unknown preconditioner '" + numerics.preconditioner + "'");
  return o;
}

std::vector<double> RunConfig::alpha_values() const {
  std::vector<double> vals;
  int n = static_cast<int>(std::round((alpha_grid.stop - alpha_grid.start) / alpha_grid.step));
  for (int i = 0; i <= n; ++i) {
    double a = alpha_grid.start + i * alpha_grid.step;
    if (a > 0.0 && a < 1.0 && a <= alpha_grid.stop + 1e-12) vals.push_back(a);
  }
  if (vals.empty()) throw ValidationError("config: empty alpha grid");
  return vals;
}

namespace {

VesselClass vessel_class_from(const std::string& s) {
  if (s == "arterial") return VesselClass::arterial;
  if (s == "venous") return VesselClass::venous;
  if (s == "capillary") return VesselClass::capillary;
  if (s == "unlabeled") return VesselClass::unlabeled;
  throw ParseError("config: unknown vessel class '" + s + "'");
}

std::string vessel_class_to(VesselClass c) {
  switch (c) {
    case VesselClass::arterial: return "arterial";
    case VesselClass::venous: return "venous";
    case VesselClass::capillary: return "capillary";
    default: return "unlabeled";
  }
}

json vec3_to(const Vec3& v) { return json::array({v.x, v.y, v.z}); }
Vec3 vec3_from(const json& j) { return {j.at(0), j.at(1), j.at(2)}; }

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config JSON: ") + e.what());
  }
  RunConfig cfg;
  try {
    if (j.contains("network")) cfg.network_path = j["network"].get<std::string>();
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("domain")) {
      cfg.domain.lo = vec3_from(j["domain"].at("lo"));
      cfg.domain.hi = vec3_from(j["domain"].at("hi"));
    }
    if (j.contains("grid"))
      cfg.grid = {j["grid"].at(0).get<int>(), j["grid"].at(1).get<int>(),
                  j["grid"].at(2).get<int>()};
    if (j.contains("rev"))
      cfg.rev = {j["rev"].at(0).get<int>(), j["rev"].at(1).get<int>(), j["rev"].at(2).get<int>()};

    if (j.contains("parameters")) {
      const json& p = j["parameters"];
      if (p.contains("H")) cfg.H = p["H"];
      if (p.contains("K_t")) cfg.K_t = p["K_t"];
      if (p.contains("mu_int")) cfg.mu_int = p["mu_int"];
      if (p.contains("mu_p")) cfg.mu_p = p["mu_p"];
      if (p.contains("rho_bl")) cfg.rho_bl = p["rho_bl"];
      if (p.contains("rho_int")) cfg.rho_int = p["rho_int"];
      if (p.contains("pi_p")) cfg.pi_p = p["pi_p"];
      if (p.contains("pi_int")) cfg.pi_int = p["pi_int"];
      if (p.contains("L_cap")) cfg.L_cap = p["L_cap"];
      if (p.contains("R_T")) cfg.R_T = p["R_T"];
    }
    if (j.contains("numerics")) {
      const json& nj = j["numerics"];
      if (nj.contains("solver_tol")) cfg.numerics.solver_tol = nj["solver_tol"];
      if (nj.contains("max_iter")) cfg.numerics.max_iter = nj["max_iter"];
      if (nj.contains("preconditioner"))
        cfg.numerics.preconditioner = nj["preconditioner"].get<std::string>();
      if (nj.contains("n_theta")) cfg.numerics.n_theta = nj["n_theta"];
      if (nj.contains("n_quad_per_half")) cfg.numerics.n_quad_per_half = nj["n_quad_per_half"];
      if (nj.contains("dp_upscale")) cfg.numerics.dp_upscale = nj["dp_upscale"];
      if (nj.contains("k_floor")) cfg.numerics.k_floor = nj["k_floor"];
      if (nj.contains("eps_d")) cfg.numerics.eps_d = nj["eps_d"];
      if (nj.contains("merge_tol")) cfg.numerics.merge_tol = nj["merge_tol"];
    }
    if (j.contains("alpha")) cfg.alpha = j["alpha"];
    if (j.contains("alpha_grid")) {
      const json& aj = j["alpha_grid"];
      if (aj.contains("start")) cfg.alpha_grid.start = aj["start"];
      if (aj.contains("stop")) cfg.alpha_grid.stop = aj["stop"];
      if (aj.contains("step")) cfg.alpha_grid.step = aj["step"];
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();

    if (j.contains("synthetic")) {
      const json& sj = j["synthetic"];
      LatticeSpec spec;
      spec.box = cfg.domain;
      spec.pitch = sj.at("pitch");
      if (sj.contains("radius_range")) {
        spec.radius_min = sj["radius_range"].at(0);
        spec.radius_max = sj["radius_range"].at(1);
      }
      if (sj.contains("cap_boundary_pressure"))
        spec.cap_boundary_pressure = sj["cap_boundary_pressure"];
      if (sj.contains("cap_pressure_gradient"))
        spec.cap_pressure_gradient = vec3_from(sj["cap_pressure_gradient"]);
      if (sj.contains("vessels")) {
        for (const auto& vj : sj["vessels"]) {
          VesselSpec v;
          v.style = vj.at("style").get<std::string>();
          v.terminal = {vj.at("terminal").at(0).get<int>(), vj.at("terminal").at(1).get<int>(),
                        vj.at("terminal").at(2).get<int>()};
          if (vj.contains("column"))
            v.column = {vj["column"].at(0).get<int>(), vj["column"].at(1).get<int>()};
          v.radius = vj.at("radius");
          if (vj.contains("class")) v.vessel_class = vessel_class_from(vj["class"]);
          if (vj.contains("pressure")) v.pressure = vj["pressure"];
          if (vj.contains("p_top")) v.p_top = vj["p_top"];
          if (vj.contains("p_bottom")) v.p_bottom = vj["p_bottom"];
          if (vj.contains("top_class")) v.top_class = vessel_class_from(vj["top_class"]);
          if (vj.contains("bottom_class"))
            v.bottom_class = vessel_class_from(vj["bottom_class"]);
          spec.vessels.push_back(v);
        }
      }
      cfg.synthetic = spec;
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("config JSON: ") + e.what());
  }

  if (cfg.H <= 0.0 || cfg.H >= 1.0) throw ValidationError("config: H must lie in (0,1)");
  if (cfg.mu_p <= 0.0) throw ValidationError("config: mu_p must be positive");
  if (cfg.alpha <= 0.0 || cfg.alpha >= 1.0)
    throw ValidationError("config: alpha must lie in (0,1)");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const RunConfig& cfg) {
  json j;
  j["network"] = cfg.network_path;
  j["output_dir"] = cfg.output_dir;
  j["domain"]["lo"] = vec3_to(cfg.domain.lo);
  j["domain"]["hi"] = vec3_to(cfg.domain.hi);
  j["grid"] = json::array({cfg.grid[0], cfg.grid[1], cfg.grid[2]});
  j["rev"] = json::array({cfg.rev[0], cfg.rev[1], cfg.rev[2]});
  json& p = j["parameters"];
  p["H"] = cfg.H;
  p["K_t"] = cfg.K_t;
  p["mu_int"] = cfg.mu_int;
  p["mu_p"] = cfg.mu_p;
  p["rho_bl"] = cfg.rho_bl;
  p["rho_int"] = cfg.rho_int;
  p["pi_p"] = cfg.pi_p;
  p["pi_int"] = cfg.pi_int;
  p["L_cap"] = cfg.L_cap;
  p["R_T"] = cfg.R_T;
  json& nj = j["numerics"];
  nj["solver_tol"] = cfg.numerics.solver_tol;
  nj["max_iter"] = cfg.numerics.max_iter;
  nj["preconditioner"] = cfg.numerics.preconditioner;
  nj["n_theta"] = cfg.numerics.n_theta;
  nj["n_quad_per_half"] = cfg.numerics.n_quad_per_half;
  nj["dp_upscale"] = cfg.numerics.dp_upscale;
  nj["k_floor"] = cfg.numerics.k_floor;
  nj["eps_d"] = cfg.numerics.eps_d;
  nj["merge_tol"] = cfg.numerics.merge_tol;
  j["alpha"] = cfg.alpha;
  j["alpha_grid"]["start"] = cfg.alpha_grid.start;
  j["alpha_grid"]["stop"] = cfg.alpha_grid.stop;
  j["alpha_grid"]["step"] = cfg.alpha_grid.step;
  j["seed"] = cfg.seed;
  if (cfg.synthetic) {
    const LatticeSpec& s = *cfg.synthetic;
    json sj;
    sj["pitch"] = s.pitch;
    sj["radius_range"] = json::array({s.radius_min, s.radius_max});
    sj["cap_boundary_pressure"] = s.cap_boundary_pressure;
    sj["cap_pressure_gradient"] = vec3_to(s.cap_pressure_gradient);
    sj["vessels"] = json::array();
    for (const auto& v : s.vessels) {
      json vj;
      vj["style"] = v.style;
      vj["terminal"] = json::array({v.terminal[0], v.terminal[1], v.terminal[2]});
      vj["column"] = json::array({v.column[0], v.column[1]});
      vj["radius"] = v.radius;
      vj["class"] = vessel_class_to(v.vessel_class);
      vj["pressure"] = v.pressure;
      vj["p_top"] = v.p_top;
      vj["p_bottom"] = v.p_bottom;
      vj["top_class"] = vessel_class_to(v.top_class);
      vj["bottom_class"] = vessel_class_to(v.bottom_class);
      sj["vessels"].push_back(vj);
    }
    j["synthetic"] = sj;
  }
  return j.dump(2);
}

uint64_t config_hash(const RunConfig& cfg) {
  std::string canon = config_to_json(cfg);
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace mvf
