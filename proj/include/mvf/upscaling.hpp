#ifndef MVF_UPSCALING_HPP
#define MVF_UPSCALING_HPP

#include <array>
#include <set>
#include <vector>

#include "mvf/rev.hpp"
#include "mvf/sparse.hpp"

namespace mvf {

struct UpscalingOptions {
  double dp = 100.0;        // facet pressure difference for the experiments [Pa]
  double k_floor = 1e-22;   // [m^2], axes without a facet-to-facet path
  double eps_d = 1e-8;      // facet matching distance [m]
  SolveOptions solver;
};

/// Homogenized coefficients of one REV.
struct RevCoefficients {
  int rev_id = -1;
  Vec3 k_up;                 // diagonal permeability [m^2]
  std::array<bool, 3> k_floored = {false, false, false};
  double mu_up = 0.0;        // averaged blood viscosity [Pa s]
  double surface_area = 0.0; // S_j, clipped capillary wall area [m^2]
  double bvf = 0.0;          // blood volume fraction
  double Kv_bar = 0.0;       // mean capillary permeability R^2/8 [m^2]
  Vec3 edge_lengths;
  double L_min = 0.0;        // smallest REV edge length [m]
  int member_count = 0;
  double radius_mean = 0.0, radius_std = 0.0;
};

/// Unweighted mean of the per-segment viscosity law over the member set.
double upscale_viscosity(const VascularNetwork& net, const std::set<int>& member_ids);

/// Unweighted mean of R^2/8 over the member set.
double mean_capillary_permeability(const VascularNetwork& net, const std::set<int>& member_ids);

/// Diagonal permeability via three facet-flux experiments on the member
/// subnetwork; axes without a facet connection fall back to the floor value.
Vec3 upscale_permeability(const VascularNetwork& net, const std::set<int>& member_ids,
                          const Box3& box, double mu_up, const UpscalingOptions& opts,
                          std::array<bool, 3>* floored = nullptr);

/// Clipped capillary volume over box volume.
double blood_volume_fraction(const VascularNetwork& net, const std::set<int>& member_ids,
                             const Box3& box);

/// Clipped capillary lateral surface area sum(2 pi R |clip|).
double rev_surface_area(const VascularNetwork& net, const std::set<int>& member_ids,
                        const Box3& box);

/// All coefficients for every REV of the decomposition. REVs without
/// capillaries are a hard error.
std::vector<RevCoefficients> compute_rev_coefficients(const VascularNetwork& net,
                                                      const RevDecomposition& dec,
                                                      const UpscalingOptions& opts);

struct GrowthRow {
  Vec3 size;
  Vec3 k;
  std::array<bool, 3> k_floored = {false, false, false};
  double bvf = 0.0;
};

/// Permeability/volume-fraction stabilization study: a box centered at
/// `center` grown by `step` per axis and step, clipped membership recomputed
/// from the capillary set each time.
std::vector<GrowthRow> rev_growth_study(const VascularNetwork& net,
                                        const std::set<int>& capillary_ids, const Box3& domain,
                                        const Vec3& center, const Vec3& initial_size,
                                        const Vec3& step, int n_steps,
                                        const UpscalingOptions& opts);

/// Averaged capillary boundary pressures: one value per boundary REV face of
/// each domain plane, anchored at face centers, evaluated anywhere on the
/// boundary by clamped bilinear interpolation within its plane.
class BoundaryField {
 public:
  BoundaryField() = default;
  BoundaryField(const Box3& domain, std::array<int, 3> rev_counts);

  /// plane index: 2*axis + side (side 1 = high face)
  void set_face_value(int plane, int iu, int iv, double value);
  double face_value(int plane, int iu, int iv) const;
  double evaluate(int plane, const Vec3& point) const;

  std::array<int, 2> plane_dims(int plane) const;

 private:
  Box3 domain_;
  std::array<int, 3> counts_ = {1, 1, 1};
  std::array<std::vector<double>, 6> values_;
};

/// Builds the capillary boundary field from the boundary-node pressures of
/// the capillary subnetwork. Faces without matched nodes borrow the mean of
/// their in-plane neighbors; a plane with no data at all is an error.
BoundaryField capillary_boundary_field(const VascularNetwork& net, const std::set<int>& I_C,
                                       const Box3& domain, std::array<int, 3> rev_counts,
                                       double eps_d);

}  // namespace mvf

#endif
