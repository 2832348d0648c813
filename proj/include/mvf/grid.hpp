#ifndef MVF_GRID_HPP
#define MVF_GRID_HPP

#include <array>

#include "mvf/errors.hpp"
#include "mvf/geometry.hpp"

namespace mvf {

/// Cell-centered uniform hexahedral grid over the domain box.
struct UniformGrid {
  Vec3 origin;
  Vec3 extent;
  std::array<int, 3> n = {1, 1, 1};

  UniformGrid() = default;
  UniformGrid(const Box3& box, std::array<int, 3> counts) : origin(box.lo), n(counts) {
    extent = box.hi - box.lo;
    if (n[0] < 1 || n[1] < 1 || n[2] < 1)
      throw ValidationError("grid: cell counts must be at least 1 per axis");
    if (extent.x <= 0.0 || extent.y <= 0.0 || extent.z <= 0.0)
      throw ValidationError("grid: extent must be strictly positive");
  }

  int num_cells() const { return n[0] * n[1] * n[2]; }
  double spacing(int axis) const { return extent[axis] / n[axis]; }
  Vec3 spacing() const { return {spacing(0), spacing(1), spacing(2)}; }
  double cell_volume() const { return spacing(0) * spacing(1) * spacing(2); }
  double face_area(int axis) const {
    return axis == 0 ? spacing(1) * spacing(2)
                     : (axis == 1 ? spacing(0) * spacing(2) : spacing(0) * spacing(1));
  }
  Box3 box() const { return {origin, origin + extent}; }

  int flat(int i, int j, int k) const { return i + n[0] * (j + n[1] * k); }
  std::array<int, 3> unflat(int c) const {
    return {c % n[0], (c / n[0]) % n[1], c / (n[0] * n[1])};
  }

  Vec3 cell_center(int c) const {
    auto [i, j, k] = unflat(c);
    return {origin.x + (i + 0.5) * spacing(0), origin.y + (j + 0.5) * spacing(1),
            origin.z + (k + 0.5) * spacing(2)};
  }

  /// Cell owning a point of the closed domain box; indices clamp so points on
  /// the upper faces belong to the last cell.
  std::array<int, 3> cell_of(const Vec3& p) const {
    std::array<int, 3> idx;
    for (int ax = 0; ax < 3; ++ax) {
      int i = static_cast<int>((p[ax] - origin[ax]) / spacing(ax));
      idx[ax] = i < 0 ? 0 : (i >= n[ax] ? n[ax] - 1 : i);
    }
    return idx;
  }
  int cell_of_flat(const Vec3& p) const {
    auto c = cell_of(p);
    return flat(c[0], c[1], c[2]);
  }
};

}  // namespace mvf

#endif
