#include "mvf/synthetic.hpp"

#include <cmath>
#include <random>
#include <set>

#include "mvf/errors.hpp"

namespace mvf {

namespace {

// Portable uniform in [0,1) from the top 53 bits of the generator.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::array<int, 3> lattice_node_counts(const LatticeSpec& spec) {
  std::array<int, 3> n;
  for (int ax = 0; ax < 3; ++ax) {
    double ext = spec.box.hi[ax] - spec.box.lo[ax];
    double cells = ext / spec.pitch;
    double rounded = std::round(cells);
    if (rounded < 2.0 || std::abs(cells - rounded) > 1e-9 * cells)
      throw ValidationError("lattice: box extent must be an exact multiple (>= 2) of the pitch");
    n[ax] = static_cast<int>(rounded) - 1;
  }
  return n;
}

VascularNetwork generate_synthetic(const LatticeSpec& spec, uint64_t seed,
                                   double threshold_radius, const RheologyParams& rheology) {
  if (spec.radius_min <= 0.0 || spec.radius_max < spec.radius_min)
    throw ValidationError("lattice: need 0 < radius_min <= radius_max");
  if (spec.radius_max >= threshold_radius)
    throw ValidationError("lattice: capillary radii must stay below the vessel threshold");

  auto n = lattice_node_counts(spec);
  const int nx = n[0], ny = n[1], nz = n[2];
  auto coord = [&](int ax, int i) { return spec.box.lo[ax] + spec.pitch * (i + 1); };
  auto flat = [&](int i, int j, int k) { return i + nx * (j + ny * k); };

  std::mt19937_64 rng(seed);
  auto draw_radius = [&]() {
    return spec.radius_min + uniform01(rng) * (spec.radius_max - spec.radius_min);
  };
  Vec3 center = spec.box.center();
  auto cap_pressure = [&](const Vec3& p) {
    return spec.cap_boundary_pressure + dot(spec.cap_pressure_gradient, p - center);
  };

  VascularNetwork net;
  auto add_node = [&](const Vec3& pos, std::optional<double> pressure, VesselClass cls) {
    NetworkNode nd;
    nd.id = static_cast<int>(net.nodes.size());
    nd.position = pos;
    nd.boundary_pressure = pressure;
    nd.kind = pressure ? NodeKind::boundary : NodeKind::interior;
    nd.vessel_class = cls;
    net.nodes.push_back(nd);
    return nd.id;
  };
  auto add_segment = [&](int a, int b, double radius) {
    Segment s;
    s.n1 = a;
    s.n2 = b;
    s.radius = radius;
    net.segments.push_back(s);
  };

  // Junction nodes.
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        add_node({coord(0, i), coord(1, j), coord(2, k)}, std::nullopt, VesselClass::unlabeled);

  // Interior lattice edges, axis by axis.
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i + 1 < nx; ++i) add_segment(flat(i, j, k), flat(i + 1, j, k), draw_radius());
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j + 1 < ny; ++j)
      for (int i = 0; i < nx; ++i) add_segment(flat(i, j, k), flat(i, j + 1, k), draw_radius());
  for (int k = 0; k + 1 < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) add_segment(flat(i, j, k), flat(i, j, k + 1), draw_radius());

  // Columns whose top-face stub is replaced by a stub vessel.
  std::set<std::pair<int, int>> displaced_top_stubs;
  std::set<std::array<int, 3>> used_terminals;
  for (const auto& v : spec.vessels) {
    if (v.style == "stub") {
      if (!displaced_top_stubs.insert({v.terminal[0], v.terminal[1]}).second)
        throw ValidationError("lattice: two stub vessels share a column");
    }
    if (!used_terminals.insert(v.terminal).second)
      throw ValidationError("lattice: two vessels share a terminal node");
  }

  // Boundary stubs from shell junctions to the box faces.
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        int id = flat(i, j, k);
        Vec3 p = net.nodes[id].position;
        struct Face {
          bool on;
          int axis;
          double face_coord;
        };
        Face faces[6] = {{i == 0, 0, spec.box.lo.x},      {i == nx - 1, 0, spec.box.hi.x},
                         {j == 0, 1, spec.box.lo.y},      {j == ny - 1, 1, spec.box.hi.y},
                         {k == 0, 2, spec.box.lo.z},      {k == nz - 1, 2, spec.box.hi.z}};
        for (const auto& f : faces) {
          if (!f.on) continue;
          if (f.axis == 2 && f.face_coord == spec.box.hi.z && displaced_top_stubs.count({i, j}))
            continue;
          Vec3 bp = p;
          bp[f.axis] = f.face_coord;
          int bid = add_node(bp, cap_pressure(bp), VesselClass::capillary);
          add_segment(id, bid, draw_radius());
        }
      }

  // Penetrating vessels.
  for (const auto& v : spec.vessels) {
    auto [ti, tj, tk] = v.terminal;
    if (ti < 0 || ti >= nx || tj < 0 || tj >= ny || tk < 0 || tk >= nz)
      throw ValidationError("lattice: vessel terminal outside the lattice");
    if (v.radius < threshold_radius)
      throw ValidationError("lattice: penetrating vessel radius below the threshold");
    if (v.style == "stub") {
      Vec3 top{coord(0, ti), coord(1, tj), spec.box.hi.z};
      int bid = add_node(top, v.pressure, v.vessel_class);
      add_segment(bid, flat(ti, tj, tk), v.radius);
    } else if (v.style == "through") {
      double cx = coord(0, v.column[0]) + 0.5 * spec.pitch;
      double cy = coord(1, v.column[1]) + 0.5 * spec.pitch;
      if (cx >= spec.box.hi.x || cy >= spec.box.hi.y)
        throw ValidationError("lattice: through-vessel column outside the box");
      int top = add_node({cx, cy, spec.box.hi.z}, v.p_top, v.top_class);
      int mid = add_node({cx, cy, coord(2, tk)}, std::nullopt, VesselClass::unlabeled);
      int bot = add_node({cx, cy, spec.box.lo.z}, v.p_bottom, v.bottom_class);
      add_segment(top, mid, v.radius);
      add_segment(mid, bot, v.radius);
      add_segment(mid, flat(ti, tj, tk), v.radius);
    } else {
      throw ValidationError("lattice: unknown vessel style '" + v.style + "'");
    }
  }

  net.finalize(rheology);  // throws if the parameters produced a broken graph
  return net;
}

}  // namespace mvf
