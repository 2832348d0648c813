#ifndef MVF_CIRCLE_HPP
#define MVF_CIRCLE_HPP

#include <set>
#include <utility>
#include <vector>

#include "mvf/grid.hpp"
#include "mvf/network.hpp"

namespace mvf {

/// Quadrature stencil for the average of a cell-centered field over the
/// circle of radius R around a point on a segment, in the plane normal to
/// the segment. Weights are fractions of the kept sample count per owning
/// cell and sum to ~1; samples outside the domain are dropped and the
/// remaining weights renormalized.
struct CircleStencil {
  std::vector<std::pair<int, double>> cell_weights;  // (flat cell, weight)
  int samples_kept = 0;
  int samples_total = 0;
};

CircleStencil build_circle_stencil(const UniformGrid& grid, const Vec3& center,
                                   const Vec3& tangent, double radius, int n_theta);

/// Weighted mean of the cell-centered field over the stencil.
double circle_average(const std::vector<double>& cell_field, const CircleStencil& stencil);

/// One wall-exchange quadrature station on a capillary segment.
struct WallStation {
  int seg_id = -1;
  int owner_node = -1;    // balance row receiving the exchange; -1 if both ends Dirichlet
  double arc_t = 0.0;     // position along the segment in [0,1]
  double surface_weight = 0.0;  // 2 pi R ds [m^2]
  double interp_n1 = 0.0, interp_n2 = 0.0;  // I(p^v) = a p(n1) + b p(n2)
  CircleStencil stencil;
};

/// Stations for all capillary segments: each segment half contributes
/// n_quad_per_half stations at sub-interval midpoints, owned by the half's
/// node (or the opposite node when that one is a Dirichlet boundary node).
std::vector<WallStation> build_wall_stations(const VascularNetwork& net,
                                             const std::set<int>& capillary_ids,
                                             const UniformGrid& grid, int n_theta,
                                             int n_quad_per_half);

}  // namespace mvf

#endif
