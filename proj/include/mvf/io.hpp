#ifndef MVF_IO_HPP
#define MVF_IO_HPP

#include <string>
#include <vector>

#include "mvf/config.hpp"
#include "mvf/grid.hpp"
#include "mvf/metrics.hpp"
#include "mvf/network.hpp"
#include "mvf/upscaling.hpp"

namespace mvf {

/// Round-trip-exact float formatting (17 significant digits).
std::string format_double(double v);

/// Minimal CSV writer: header row plus string cells, doubles preformatted.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<std::string>& cells);
  void write(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Legacy VTK structured-points file holding one cell-centered scalar field
/// (points at cell centers).
void write_vtk_scalar(const std::string& path, const UniformGrid& grid,
                      const std::vector<double>& field, const std::string& name);

/// Legacy VTK polydata of the network centerlines with per-segment radii.
void write_vtk_network(const std::string& path, const VascularNetwork& net);

/// Node pressure CSV (id, x, y, z, pressure).
void write_node_pressures(const std::string& path, const VascularNetwork& net,
                          const std::vector<double>& node_pressure,
                          const std::vector<char>* solved = nullptr);

/// Flux report CSV, rendered in micrograms per second.
void write_flux_report(const std::string& path, const FluxReport& rep);

/// Per-REV upscaled coefficient CSV.
void write_rev_coefficients(const std::string& path, const std::vector<RevCoefficients>& coeffs,
                            const RevDecomposition& dec);

/// REV pressure comparison CSV (hybrid vs fully-discrete).
void write_rev_pressures(const std::string& path, const std::vector<RevPressureRow>& rows);

/// Alpha scan CSV (alpha, f1, f2 in micrograms per second).
void write_alpha_scan(const std::string& path, const AlphaScanResult& scan);

/// Sensitivity CSV (fraction, alpha_star, delta).
void write_sensitivity(const std::string& path, const std::vector<SensitivityRow>& rows);

/// Growth study CSV.
void write_growth_study(const std::string& path, const std::vector<GrowthRow>& rows);

/// Run manifest: config hash, tool version, wall time, produced files.
void write_manifest(const std::string& path, const RunConfig& cfg, const std::string& command,
                    double wall_seconds, const std::vector<std::string>& outputs);

}  // namespace mvf

#endif
