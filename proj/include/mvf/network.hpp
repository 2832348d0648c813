#ifndef MVF_NETWORK_HPP
#define MVF_NETWORK_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mvf/geometry.hpp"
#include "mvf/rheology.hpp"

namespace mvf {

enum class NodeKind { interior, boundary };
enum class VesselClass { arterial, venous, capillary, unlabeled };

struct NetworkNode {
  int id = -1;
  Vec3 position;                            // [m]
  NodeKind kind = NodeKind::interior;
  std::optional<double> boundary_pressure;  // [Pa], present iff kind == boundary
  VesselClass vessel_class = VesselClass::unlabeled;
};

struct Segment {
  int id = -1;
  int n1 = -1, n2 = -1;  // endpoint node ids
  double radius = 0.0;   // [m]
  double length = 0.0;   // [m], cached from endpoint positions
  double mu_bl = 0.0;    // [Pa*s], cached per-segment viscosity from the radius

  /// Poiseuille permeability K_v = R^2/8 [m^2].
  double permeability() const { return radius * radius / 8.0; }
};

/// 1D vascular graph: straight segments with constant radii, pressure data
/// at boundary nodes. Immutable after construction/validation.
struct VascularNetwork {
  std::vector<NetworkNode> nodes;
  std::vector<Segment> segments;
  std::vector<std::vector<int>> adjacency;  // node index -> incident segment ids

  const NetworkNode& node(int id) const { return nodes.at(id); }
  const Segment& segment(int id) const { return segments.at(id); }
  int degree(int node_id) const { return static_cast<int>(adjacency.at(node_id).size()); }

  int other_end(int seg_id, int node_id) const {
    const Segment& s = segments.at(seg_id);
    return s.n1 == node_id ? s.n2 : s.n1;
  }

  Vec3 segment_point(int seg_id, double t) const {
    const Segment& s = segments.at(seg_id);
    return nodes[s.n1].position + t * (nodes[s.n2].position - nodes[s.n1].position);
  }

  /// Rebuilds adjacency, cached lengths and per-segment viscosities, then
  /// checks all structural invariants (referential integrity, positive
  /// radii/lengths, boundary degree 1, connectivity).
  void finalize(const RheologyParams& rheology);

  std::vector<int> boundary_node_ids() const;
};

/// Reads the network JSON file. Duplicate nodes closer than merge_tol are
/// merged; structural invariants are checked via finalize().
VascularNetwork load_network(const std::string& path, const RheologyParams& rheology,
                             double merge_tol = 1e-12);

/// Same, from an already-parsed JSON text (used by tests and the loader).
VascularNetwork parse_network_json(const std::string& text, const RheologyParams& rheology,
                                   double merge_tol = 1e-12);

std::string network_to_json(const VascularNetwork& net);

/// Iteratively removes interior degree-1 nodes and their segments until none
/// remain. Boundary nodes (prescribed pressure) are kept. Errors if the
/// result is empty.
VascularNetwork prune_dead_ends(const VascularNetwork& net, const RheologyParams& rheology);

/// Splits segment ids by the radius threshold: I_L = {R >= R_T}, I_C = {R < R_T}.
std::pair<std::set<int>, std::set<int>> split_by_threshold(const VascularNetwork& net,
                                                           double threshold_radius);

/// Checks every node position against the closed domain box.
void validate_positions(const VascularNetwork& net, const Box3& domain);

}  // namespace mvf

#endif
