#ifndef MVF_CONFIG_HPP
#define MVF_CONFIG_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "mvf/fd_model.hpp"
#include "mvf/geometry.hpp"
#include "mvf/sparse.hpp"
#include "mvf/synthetic.hpp"

namespace mvf {

/// Numerical knobs with their documented defaults.
struct NumericsConfig {
  double solver_tol = 1e-10;
  int max_iter = 0;  // 0 -> 10n
  std::string preconditioner = "jacobi";  // "none" | "jacobi" | "ilu0"
  int n_theta = 8;
  int n_quad_per_half = 1;
  double dp_upscale = 100.0;
  double k_floor = 1e-22;
  double eps_d = 1e-8;
  double merge_tol = 1e-12;
};

struct AlphaGridConfig {
  double start = 0.05, stop = 0.95, step = 0.01;
};

/// One JSON document drives every command; physical defaults are the
/// reference parameter set and survive a serialize/parse round trip
/// bit-exactly.
struct RunConfig {
  std::string network_path;
  std::string output_dir = "out";
  Box3 domain{{0.0, 0.0, 0.0}, {1e-3, 1e-3, 1e-3}};
  std::array<int, 3> grid = {16, 16, 16};
  std::array<int, 3> rev = {2, 2, 2};

  double H = 0.45;
  double K_t = 1e-18;
  double mu_int = 1.3e-3;
  double mu_p = 1.0e-3;
  double rho_bl = 1030.0;
  double rho_int = 1000.0;
  double pi_p = 3300.0;
  double pi_int = 666.0;
  double L_cap = 1e-12;
  double R_T = 7e-6;

  NumericsConfig numerics;
  double alpha = 0.4;
  AlphaGridConfig alpha_grid;
  uint64_t seed = 1;
  std::optional<LatticeSpec> synthetic;

  RheologyParams rheology() const { return {H, mu_p}; }
  ExchangeParams exchange() const {
    return {K_t, mu_int, rho_int, rho_bl, L_cap, pi_p, pi_int};
  }
  SolveOptions solver() const;
  std::vector<double> alpha_values() const;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string config_to_json(const RunConfig& cfg);

/// FNV-1a hash of the canonical serialized config; changes iff a field does.
uint64_t config_hash(const RunConfig& cfg);

}  // namespace mvf

#endif
