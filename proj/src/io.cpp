#include "mvf/io.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "mvf/errors.hpp"

namespace mvf {

namespace {
constexpr const char* kToolVersion = "mvflow 1.0.0";
constexpr double kKgPerSecToUgPerSec = 1e9;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}
}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size())
    throw Error("CSV row width does not match the header");
  rows_.push_back(cells);
}

void CsvWriter::write(const std::string& path) const {
  auto out = open_out(path);
  for (size_t i = 0; i < header_.size(); ++i) out << (i ? "," : "") << header_[i];
  out << "\n";
  for (const auto& row : rows_) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

void write_vtk_scalar(const std::string& path, const UniformGrid& grid,
                      const std::vector<double>& field, const std::string& name) {
  auto out = open_out(path);
  out << "# vtk DataFile Version 2.0\n";
  out << name << " (cell centers)\n";
  out << "ASCII\n";
  out << "DATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << grid.n[0] << " " << grid.n[1] << " " << grid.n[2] << "\n";
  Vec3 first = grid.cell_center(0);
  out << "ORIGIN " << format_double(first.x) << " " << format_double(first.y) << " "
      << format_double(first.z) << "\n";
  out << "SPACING " << format_double(grid.spacing(0)) << " " << format_double(grid.spacing(1))
      << " " << format_double(grid.spacing(2)) << "\n";
  out << "POINT_DATA " << grid.num_cells() << "\n";
  out << "SCALARS " << name << " double 1\n";
  out << "LOOKUP_TABLE default\n";
  for (double v : field) out << format_double(v) << "\n";
}

void write_vtk_network(const std::string& path, const VascularNetwork& net) {
  auto out = open_out(path);
  out << "# vtk DataFile Version 2.0\n";
  out << "vascular network centerlines\n";
  out << "ASCII\n";
  out << "DATASET POLYDATA\n";
  out << "POINTS " << net.nodes.size() << " double\n";
  for (const auto& n : net.nodes)
    out << format_double(n.position.x) << " " << format_double(n.position.y) << " "
        << format_double(n.position.z) << "\n";
  out << "LINES " << net.segments.size() << " " << 3 * net.segments.size() << "\n";
  for (const auto& s : net.segments) out << "2 " << s.n1 << " " << s.n2 << "\n";
  out << "CELL_DATA " << net.segments.size() << "\n";
  out << "SCALARS radius double 1\n";
  out << "LOOKUP_TABLE default\n";
  for (const auto& s : net.segments) out << format_double(s.radius) << "\n";
}

void write_node_pressures(const std::string& path, const VascularNetwork& net,
                          const std::vector<double>& node_pressure,
                          const std::vector<char>* solved) {
  CsvWriter csv({"node_id", "x", "y", "z", "pressure_pa"});
  for (const auto& n : net.nodes) {
    if (solved && !(*solved)[n.id]) continue;
    csv.add_row({std::to_string(n.id), format_double(n.position.x),
                 format_double(n.position.y), format_double(n.position.z),
                 format_double(node_pressure[n.id])});
  }
  csv.write(path);
}

void write_flux_report(const std::string& path, const FluxReport& rep) {
  CsvWriter csv({"quantity", "value_ug_per_s"});
  auto row = [&](const char* name, double kgps) {
    csv.add_row({name, format_double(kgps * kKgPerSecToUgPerSec)});
  };
  row("MF_LV_in", rep.mf_lv_in);
  row("MF_LV_out", rep.mf_lv_out);
  row("MF_cap_in", rep.mf_cap_in);
  row("MF_cap_out", rep.mf_cap_out);
  row("MF_cap_t_in", rep.mf_cap_t_in);
  row("MF_cap_t_out", rep.mf_cap_t_out);
  row("MF_cap_t_net", rep.mf_cap_t_net);
  for (const auto& rf : rep.rev_boundary) {
    std::string base = "NF_rev_" + std::to_string(rf.rev_id);
    row((base + "_net").c_str(), rf.net);
    row((base + "_in").c_str(), rf.in);
    row((base + "_out").c_str(), rf.out);
  }
  for (const auto& rf : rep.rev_exchange) {
    std::string base = "NF_cap_t_rev_" + std::to_string(rf.rev_id);
    row((base + "_net").c_str(), rf.net);
  }
  csv.write(path);
}

void write_rev_coefficients(const std::string& path, const std::vector<RevCoefficients>& coeffs,
                            const RevDecomposition& dec) {
  CsvWriter csv({"rev_id", "center_x", "center_y", "center_z", "k_x", "k_y", "k_z", "mu_up",
                 "S_j", "bvf", "Kv_bar", "L_min", "n_capillaries", "radius_mean", "radius_std"});
  for (const auto& c : coeffs) {
    Vec3 ctr = dec.revs[c.rev_id].box.center();
    csv.add_row({std::to_string(c.rev_id), format_double(ctr.x), format_double(ctr.y),
                 format_double(ctr.z), format_double(c.k_up.x), format_double(c.k_up.y),
                 format_double(c.k_up.z), format_double(c.mu_up),
                 format_double(c.surface_area), format_double(c.bvf), format_double(c.Kv_bar),
                 format_double(c.L_min), std::to_string(c.member_count),
                 format_double(c.radius_mean), format_double(c.radius_std)});
  }
  csv.write(path);
}

void write_rev_pressures(const std::string& path, const std::vector<RevPressureRow>& rows) {
  CsvWriter csv({"rev_id", "center_x", "center_y", "center_z", "p_cap_hy", "p_cap_fd",
                 "e_r_cap", "p_t_hy", "p_t_fd", "e_r_t"});
  for (const auto& r : rows)
    csv.add_row({std::to_string(r.rev_id), format_double(r.center.x),
                 format_double(r.center.y), format_double(r.center.z),
                 format_double(r.p_cap_hy), format_double(r.p_cap_fd), format_double(r.e_r_cap),
                 format_double(r.p_t_hy), format_double(r.p_t_fd), format_double(r.e_r_t)});
  csv.write(path);
}

void write_alpha_scan(const std::string& path, const AlphaScanResult& scan) {
  CsvWriter csv({"alpha", "f1_ug_per_s", "f2_ug_per_s"});
  for (const auto& r : scan.rows)
    csv.add_row({format_double(r.alpha), format_double(r.f1 * kKgPerSecToUgPerSec),
                 format_double(r.f2 * kKgPerSecToUgPerSec)});
  csv.write(path);
}

void write_sensitivity(const std::string& path, const std::vector<SensitivityRow>& rows) {
  CsvWriter csv({"fraction", "alpha_star", "delta_pa"});
  for (const auto& r : rows)
    csv.add_row({format_double(r.fraction), format_double(r.alpha_star),
                 format_double(r.delta)});
  csv.write(path);
}

void write_growth_study(const std::string& path, const std::vector<GrowthRow>& rows) {
  CsvWriter csv({"size_x", "size_y", "size_z", "k_x", "k_y", "k_z", "bvf"});
  for (const auto& r : rows)
    csv.add_row({format_double(r.size.x), format_double(r.size.y), format_double(r.size.z),
                 format_double(r.k.x), format_double(r.k.y), format_double(r.k.z),
                 format_double(r.bvf)});
  csv.write(path);
}

void write_manifest(const std::string& path, const RunConfig& cfg, const std::string& command,
                    double wall_seconds, const std::vector<std::string>& outputs) {
  nlohmann::json j;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  j["config_hash"] = hash;
  j["version"] = kToolVersion;
  j["command"] = command;
  j["wall_seconds"] = wall_seconds;
  j["outputs"] = outputs;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

}  // namespace mvf
