#include "mvf/circle.hpp"

#include <cmath>
#include <map>

#include "mvf/errors.hpp"

namespace mvf {

CircleStencil build_circle_stencil(const UniformGrid& grid, const Vec3& center,
                                   const Vec3& tangent, double radius, int n_theta) {
  if (n_theta < 1) throw ValidationError("circle stencil: n_theta must be positive");
  Vec3 t = normalized(tangent);
  // In-plane basis: cross with the axis least aligned with the tangent.
  int least = 0;
  double amin = std::abs(t.x);
  if (std::abs(t.y) < amin) { least = 1; amin = std::abs(t.y); }
  if (std::abs(t.z) < amin) least = 2;
  Vec3 axis{least == 0 ? 1.0 : 0.0, least == 1 ? 1.0 : 0.0, least == 2 ? 1.0 : 0.0};
  Vec3 e1 = normalized(cross(t, axis));
  Vec3 e2 = cross(t, e1);

  Box3 domain = grid.box();
  std::map<int, int> counts;
  int kept = 0;
  for (int i = 0; i < n_theta; ++i) {
    double theta = 2.0 * M_PI * i / n_theta;
    Vec3 p = center + radius * std::cos(theta) * e1 + radius * std::sin(theta) * e2;
    if (!domain.contains(p)) continue;
    counts[grid.cell_of_flat(p)]++;
    ++kept;
  }
  if (kept == 0)
    throw ValidationError("circle stencil: all sample points fall outside the domain");

  CircleStencil st;
  st.samples_total = n_theta;
  st.samples_kept = kept;
  for (auto [cell, cnt] : counts)
    st.cell_weights.emplace_back(cell, static_cast<double>(cnt) / kept);
  return st;
}

double circle_average(const std::vector<double>& cell_field, const CircleStencil& stencil) {
  double acc = 0.0;
  for (auto [cell, w] : stencil.cell_weights) acc += w * cell_field[cell];
  return acc;
}

std::vector<WallStation> build_wall_stations(const VascularNetwork& net,
                                             const std::set<int>& capillary_ids,
                                             const UniformGrid& grid, int n_theta,
                                             int n_quad_per_half) {
  if (n_quad_per_half < 1)
    throw ValidationError("wall stations: need at least one station per half edge");
  std::vector<WallStation> stations;
  stations.reserve(capillary_ids.size() * 2 * n_quad_per_half);
  for (int sid : capillary_ids) {
    const Segment& seg = net.segments.at(sid);
    Vec3 a = net.nodes[seg.n1].position;
    Vec3 b = net.nodes[seg.n2].position;
    Vec3 tangent = b - a;
    bool n1_interior = net.nodes[seg.n1].kind == NodeKind::interior;
    bool n2_interior = net.nodes[seg.n2].kind == NodeKind::interior;

    for (int half = 0; half < 2; ++half) {
      int half_node = half == 0 ? seg.n1 : seg.n2;
      int other_node = half == 0 ? seg.n2 : seg.n1;
      bool half_ok = half == 0 ? n1_interior : n2_interior;
      bool other_ok = half == 0 ? n2_interior : n1_interior;
      int owner = half_ok ? half_node : (other_ok ? other_node : -1);
      double t_lo = half == 0 ? 0.0 : 0.5;
      for (int q = 0; q < n_quad_per_half; ++q) {
        WallStation st;
        st.seg_id = sid;
        st.owner_node = owner;
        st.arc_t = t_lo + 0.5 * (q + 0.5) / n_quad_per_half;
        st.surface_weight = 2.0 * M_PI * seg.radius * (0.5 * seg.length / n_quad_per_half);
        st.interp_n1 = 1.0 - st.arc_t;
        st.interp_n2 = st.arc_t;
        st.stencil = build_circle_stencil(grid, a + st.arc_t * tangent, tangent, seg.radius,
                                          n_theta);
        stations.push_back(st);
      }
    }
  }
  return stations;
}

}  // namespace mvf
