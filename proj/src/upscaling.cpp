#include "mvf/upscaling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mvf/errors.hpp"
#include "mvf/rheology.hpp"
#include "mvf/vgm.hpp"

namespace mvf {

double upscale_viscosity(const VascularNetwork& net, const std::set<int>& member_ids) {
  if (member_ids.empty())
    throw ValidationError("upscale_viscosity: REV contains no capillary segments");
  double acc = 0.0;
  for (int sid : member_ids) acc += net.segments.at(sid).mu_bl;
  return acc / static_cast<double>(member_ids.size());
}

double mean_capillary_permeability(const VascularNetwork& net, const std::set<int>& member_ids) {
  if (member_ids.empty())
    throw ValidationError("mean_capillary_permeability: empty member set");
  double acc = 0.0;
  for (int sid : member_ids) acc += net.segments.at(sid).permeability();
  return acc / static_cast<double>(member_ids.size());
}

Vec3 upscale_permeability(const VascularNetwork& net, const std::set<int>& member_ids,
                          const Box3& box, double mu_up, const UpscalingOptions& opts,
                          std::array<bool, 3>* floored) {
  Vec3 ext = box.extent();
  Vec3 k;
  for (int ax = 0; ax < 3; ++ax) {
    double l_axis = ext[ax];
    double l_perp = ext[(ax + 1) % 3] * ext[(ax + 2) % 3];
    double k_ax;
    bool hit_floor = false;
    try {
      double vf_out = permeability_experiment(net, member_ids, box, ax, opts.dp, 0.0,
                                              opts.eps_d, opts.solver);
      k_ax = vf_out * mu_up * l_axis / (l_perp * opts.dp);
      if (!(k_ax > opts.k_floor)) {
        k_ax = opts.k_floor;
        hit_floor = true;
      }
    } catch (const InfeasibleError&) {
      k_ax = opts.k_floor;
      hit_floor = true;
    }
    k[ax] = k_ax;
    if (floored) (*floored)[ax] = hit_floor;
  }
  return k;
}

double blood_volume_fraction(const VascularNetwork& net, const std::set<int>& member_ids,
                             const Box3& box) {
  double vol = 0.0;
  for (int sid : member_ids) {
    const Segment& s = net.segments.at(sid);
    double len = clipped_length(net.nodes[s.n1].position, net.nodes[s.n2].position, box);
    vol += M_PI * s.radius * s.radius * len;
  }
  return vol / box.volume();
}

double rev_surface_area(const VascularNetwork& net, const std::set<int>& member_ids,
                        const Box3& box) {
  double area = 0.0;
  for (int sid : member_ids) {
    const Segment& s = net.segments.at(sid);
    double len = clipped_length(net.nodes[s.n1].position, net.nodes[s.n2].position, box);
    area += 2.0 * M_PI * s.radius * len;
  }
  return area;
}

std::vector<RevCoefficients> compute_rev_coefficients(const VascularNetwork& net,
                                                      const RevDecomposition& dec,
                                                      const UpscalingOptions& opts) {
  std::vector<RevCoefficients> out;
  out.reserve(dec.revs.size());
  for (const auto& rev : dec.revs) {
    if (rev.capillary_segment_ids.empty())
      throw ValidationError("REV " + std::to_string(rev.id) +
                            " contains no capillary segments; the homogenized model is "
                            "undefined there");
    RevCoefficients c;
    c.rev_id = rev.id;
    c.mu_up = upscale_viscosity(net, rev.capillary_segment_ids);
    c.Kv_bar = mean_capillary_permeability(net, rev.capillary_segment_ids);
    c.k_up = upscale_permeability(net, rev.capillary_segment_ids, rev.box, c.mu_up, opts,
                                  &c.k_floored);
    c.surface_area = rev_surface_area(net, rev.capillary_segment_ids, rev.box);
    c.bvf = blood_volume_fraction(net, rev.capillary_segment_ids, rev.box);
    c.edge_lengths = rev.box.extent();
    c.L_min = std::min({c.edge_lengths.x, c.edge_lengths.y, c.edge_lengths.z});
    c.member_count = static_cast<int>(rev.capillary_segment_ids.size());
    double mean = 0.0;
    for (int sid : rev.capillary_segment_ids) mean += net.segments[sid].radius;
    mean /= c.member_count;
    double var = 0.0;
    for (int sid : rev.capillary_segment_ids) {
      double d = net.segments[sid].radius - mean;
      var += d * d;
    }
    c.radius_mean = mean;
    c.radius_std = std::sqrt(var / c.member_count);
    out.push_back(c);
  }
  return out;
}

std::vector<GrowthRow> rev_growth_study(const VascularNetwork& net,
                                        const std::set<int>& capillary_ids, const Box3& domain,
                                        const Vec3& center, const Vec3& initial_size,
                                        const Vec3& step, int n_steps,
                                        const UpscalingOptions& opts) {
  std::vector<GrowthRow> rows;
  for (int s = 0; s < n_steps; ++s) {
    Vec3 size = initial_size + static_cast<double>(s) * step;
    Box3 box{center - 0.5 * size, center + 0.5 * size};
    if (!domain.contains(box.lo) || !domain.contains(box.hi))
      throw ValidationError("rev_growth_study: step " + std::to_string(s) +
                            " grows the box outside the domain");
    std::set<int> members;
    for (int sid : capillary_ids) {
      const Segment& seg = net.segments.at(sid);
      if (segment_meets_box(net.nodes[seg.n1].position, net.nodes[seg.n2].position, box))
        members.insert(sid);
    }
    GrowthRow row;
    row.size = size;
    if (members.empty()) {
      row.k = {0.0, 0.0, 0.0};
      row.bvf = 0.0;
    } else {
      double mu_up = upscale_viscosity(net, members);
      row.k = upscale_permeability(net, members, box, mu_up, opts, &row.k_floored);
      row.bvf = blood_volume_fraction(net, members, box);
    }
    rows.push_back(row);
  }
  return rows;
}

BoundaryField::BoundaryField(const Box3& domain, std::array<int, 3> rev_counts)
    : domain_(domain), counts_(rev_counts) {
  for (int plane = 0; plane < 6; ++plane) {
    auto [mu, mv] = plane_dims(plane);
    values_[plane].assign(static_cast<size_t>(mu) * mv, std::nan(""));
  }
}

std::array<int, 2> BoundaryField::plane_dims(int plane) const {
  int axis = plane / 2;
  return {counts_[(axis + 1) % 3], counts_[(axis + 2) % 3]};
}

void BoundaryField::set_face_value(int plane, int iu, int iv, double value) {
  auto [mu, mv] = plane_dims(plane);
  (void)mv;
  values_[plane][iu + static_cast<size_t>(mu) * iv] = value;
}

double BoundaryField::face_value(int plane, int iu, int iv) const {
  auto [mu, mv] = plane_dims(plane);
  (void)mv;
  return values_[plane][iu + static_cast<size_t>(mu) * iv];
}

double BoundaryField::evaluate(int plane, const Vec3& point) const {
  int axis = plane / 2;
  int u = (axis + 1) % 3, v = (axis + 2) % 3;
  auto [mu, mv] = plane_dims(plane);
  double du = (domain_.hi[u] - domain_.lo[u]) / mu;
  double dv = (domain_.hi[v] - domain_.lo[v]) / mv;
  // Coordinates in units of face centers; clamped to the center hull.
  double su = (point[u] - domain_.lo[u]) / du - 0.5;
  double sv = (point[v] - domain_.lo[v]) / dv - 0.5;
  su = std::clamp(su, 0.0, static_cast<double>(mu - 1));
  sv = std::clamp(sv, 0.0, static_cast<double>(mv - 1));
  int iu = std::min(static_cast<int>(su), mu - 2 < 0 ? 0 : mu - 2);
  int iv = std::min(static_cast<int>(sv), mv - 2 < 0 ? 0 : mv - 2);
  double fu = mu > 1 ? su - iu : 0.0;
  double fv = mv > 1 ? sv - iv : 0.0;
  int iu1 = std::min(iu + 1, mu - 1);
  int iv1 = std::min(iv + 1, mv - 1);
  double v00 = face_value(plane, iu, iv);
  double v10 = face_value(plane, iu1, iv);
  double v01 = face_value(plane, iu, iv1);
  double v11 = face_value(plane, iu1, iv1);
  return (1 - fu) * (1 - fv) * v00 + fu * (1 - fv) * v10 + (1 - fu) * fv * v01 + fu * fv * v11;
}

BoundaryField capillary_boundary_field(const VascularNetwork& net, const std::set<int>& I_C,
                                       const Box3& domain, std::array<int, 3> rev_counts,
                                       double eps_d) {
  BoundaryField field(domain, rev_counts);

  // Capillary boundary nodes: degree-1 boundary nodes whose segment is capillary.
  std::vector<int> cap_boundary;
  for (const auto& nd : net.nodes) {
    if (nd.kind != NodeKind::boundary) continue;
    if (!net.adjacency[nd.id].empty() && I_C.count(net.adjacency[nd.id].front()))
      cap_boundary.push_back(nd.id);
  }

  for (int plane = 0; plane < 6; ++plane) {
    int axis = plane / 2;
    int side = plane % 2;
    int u = (axis + 1) % 3, v = (axis + 2) % 3;
    auto [mu, mv] = field.plane_dims(plane);
    double plane_coord = side == 1 ? domain.hi[axis] : domain.lo[axis];
    double du = (domain.hi[u] - domain.lo[u]) / mu;
    double dv = (domain.hi[v] - domain.lo[v]) / mv;

    std::vector<double> sums(static_cast<size_t>(mu) * mv, 0.0);
    std::vector<int> hits(static_cast<size_t>(mu) * mv, 0);
    for (int nid : cap_boundary) {
      const Vec3& p = net.nodes[nid].position;
      for (int iv = 0; iv < mv; ++iv)
        for (int iu = 0; iu < mu; ++iu) {
          Box3 rect;
          rect.lo[axis] = rect.hi[axis] = plane_coord;
          rect.lo[u] = domain.lo[u] + iu * du;
          rect.hi[u] = domain.lo[u] + (iu + 1) * du;
          rect.lo[v] = domain.lo[v] + iv * dv;
          rect.hi[v] = domain.lo[v] + (iv + 1) * dv;
          if (dist_to_face_rect(p, axis, plane_coord, rect) < eps_d) {
            sums[iu + static_cast<size_t>(mu) * iv] += *net.nodes[nid].boundary_pressure;
            hits[iu + static_cast<size_t>(mu) * iv]++;
          }
        }
    }

    std::vector<double> vals(static_cast<size_t>(mu) * mv, std::nan(""));
    int filled = 0;
    for (size_t f = 0; f < vals.size(); ++f)
      if (hits[f] > 0) {
        vals[f] = sums[f] / hits[f];
        ++filled;
      }
    if (filled == 0) {
      static const char* names[6] = {"x-", "x+", "y-", "y+", "z-", "z+"};
      throw ValidationError(std::string("capillary boundary field: no capillary boundary "
                                        "nodes matched any REV face on plane ") +
                            names[plane]);
    }
    // Borrow from in-plane neighbors for faces without matched nodes.
    while (filled < static_cast<int>(vals.size())) {
      std::vector<double> next = vals;
      for (int iv = 0; iv < mv; ++iv)
        for (int iu = 0; iu < mu; ++iu) {
          size_t f = iu + static_cast<size_t>(mu) * iv;
          if (!std::isnan(vals[f])) continue;
          double acc = 0.0;
          int cnt = 0;
          auto probe = [&](int a, int b) {
            if (a < 0 || a >= mu || b < 0 || b >= mv) return;
            double w = vals[a + static_cast<size_t>(mu) * b];
            if (!std::isnan(w)) {
              acc += w;
              ++cnt;
            }
          };
          probe(iu - 1, iv);
          probe(iu + 1, iv);
          probe(iu, iv - 1);
          probe(iu, iv + 1);
          if (cnt > 0) {
            next[f] = acc / cnt;
            ++filled;
          }
        }
      vals = next;
    }
    for (int iv = 0; iv < mv; ++iv)
      for (int iu = 0; iu < mu; ++iu)
        field.set_face_value(plane, iu, iv, vals[iu + static_cast<size_t>(mu) * iv]);
  }
  return field;
}

}  // namespace mvf
