#ifndef MVF_GEOMETRY_HPP
#define MVF_GEOMETRY_HPP

#include <algorithm>
#include <array>
#include <cmath>

namespace mvf {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a) {
  double n = norm(a);
  return {a.x / n, a.y / n, a.z / n};
}

/// Axis-aligned box. All geometric membership tests use the closed box.
struct Box3 {
  Vec3 lo, hi;

  Vec3 extent() const { return hi - lo; }
  Vec3 center() const { return {0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y), 0.5 * (lo.z + hi.z)}; }
  double volume() const {
    Vec3 e = extent();
    return e.x * e.y * e.z;
  }
  bool contains(const Vec3& p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z && p.z <= hi.z;
  }
  bool strictly_inside(const Vec3& p) const {
    return p.x > lo.x && p.x < hi.x && p.y > lo.y && p.y < hi.y && p.z > lo.z && p.z < hi.z;
  }
};

/// Parametric overlap of segment a->b with the closed box (slab method).
/// Returns {t0, t1} clamped to [0,1]; t0 > t1 means no interval overlap.
inline std::array<double, 2> clip_segment_box(const Vec3& a, const Vec3& b, const Box3& box) {
  double t0 = 0.0, t1 = 1.0;
  for (int ax = 0; ax < 3; ++ax) {
    double d = b[ax] - a[ax];
    if (d == 0.0) {
      if (a[ax] < box.lo[ax] || a[ax] > box.hi[ax]) return {1.0, 0.0};
    } else {
      double ta = (box.lo[ax] - a[ax]) / d;
      double tb = (box.hi[ax] - a[ax]) / d;
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      if (t0 > t1) return {1.0, 0.0};
    }
  }
  return {t0, t1};
}

/// Length of the part of segment a->b inside the closed box.
inline double clipped_length(const Vec3& a, const Vec3& b, const Box3& box) {
  auto [t0, t1] = clip_segment_box(a, b, box);
  return t1 > t0 ? (t1 - t0) * norm(b - a) : 0.0;
}

/// Segment/box membership: overlap of positive length, or an endpoint in the closed box.
inline bool segment_meets_box(const Vec3& a, const Vec3& b, const Box3& box) {
  if (box.contains(a) || box.contains(b)) return true;
  auto [t0, t1] = clip_segment_box(a, b, box);
  return t1 > t0;
}

/// Distance from a point to an axis-aligned rectangle lying in the plane axis = plane_coord,
/// spanned by [lo_u, hi_u] x [lo_v, hi_v] in the two remaining axes.
inline double dist_to_face_rect(const Vec3& p, int axis, double plane_coord, const Box3& box) {
  int u = (axis + 1) % 3, v = (axis + 2) % 3;
  double du = std::max({box.lo[u] - p[u], 0.0, p[u] - box.hi[u]});
  double dv = std::max({box.lo[v] - p[v], 0.0, p[v] - box.hi[v]});
  double dn = p[axis] - plane_coord;
  return std::sqrt(dn * dn + du * du + dv * dv);
}

}  // namespace mvf

#endif
