#ifndef MVF_SYNTHETIC_HPP
#define MVF_SYNTHETIC_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mvf/network.hpp"

namespace mvf {

/// Penetrating vessel description for the lattice generator.
///
/// style "stub": one large segment from a boundary node on the top face
/// straight down to the lattice node `terminal`.
///
/// style "through": a trunk offset half a pitch diagonally from lattice
/// column `column`, running from the top face to the bottom face with a mid
/// junction at the terminal's z-level, plus one branch segment from the mid
/// junction to the lattice node `terminal`. Top and bottom boundary nodes
/// carry their own pressures and class labels.
struct VesselSpec {
  std::string style = "stub";  // "stub" | "through"
  std::array<int, 3> terminal = {0, 0, 0};
  std::array<int, 2> column = {0, 0};  // through only: trunk base column
  double radius = 1.0e-5;
  VesselClass vessel_class = VesselClass::arterial;  // stub boundary node label
  double pressure = 0.0;                             // stub boundary pressure
  double p_top = 0.0, p_bottom = 0.0;                // through boundary pressures
  VesselClass top_class = VesselClass::arterial;
  VesselClass bottom_class = VesselClass::venous;
};

/// Cubic capillary lattice with boundary stubs and penetrating large vessels.
/// The lattice spans box with interior junctions at lo + pitch*(1..n) per
/// axis; the extents must be exact multiples of the pitch.
struct LatticeSpec {
  Box3 box;
  double pitch = 5.0e-5;
  double radius_min = 2.5e-6, radius_max = 3.5e-6;  // capillary radii, uniform [min, max)
  double cap_boundary_pressure = 3000.0;            // [Pa]
  Vec3 cap_pressure_gradient;                       // [Pa/m], about the box center
  std::vector<VesselSpec> vessels;
};

/// Deterministic for a fixed seed. Capillary radii must stay below the
/// threshold_radius and vessel radii at or above it.
VascularNetwork generate_synthetic(const LatticeSpec& spec, uint64_t seed,
                                   double threshold_radius, const RheologyParams& rheology);

/// Lattice junction counts per axis implied by the spec (box/pitch).
std::array<int, 3> lattice_node_counts(const LatticeSpec& spec);

}  // namespace mvf

#endif
