#ifndef MVF_REV_HPP
#define MVF_REV_HPP

#include <array>
#include <set>
#include <vector>

#include "mvf/grid.hpp"
#include "mvf/network.hpp"

namespace mvf {

/// One representative elementary volume: a box of whole grid cells, the
/// capillary segments meeting it, and the large-vessel terminals inside it.
struct RevBox {
  int id = -1;
  Box3 box;
  std::array<int, 3> cell_lo = {0, 0, 0};  // inclusive cell index ranges
  std::array<int, 3> cell_hi = {0, 0, 0};
  std::set<int> capillary_segment_ids;     // I_{C,j}
  std::set<int> large_terminal_node_ids;   // interior terminals of the I_L subgraph

  int cells_per_axis(int ax) const { return cell_hi[ax] - cell_lo[ax] + 1; }
  long cell_count() const {
    return static_cast<long>(cells_per_axis(0)) * cells_per_axis(1) * cells_per_axis(2);
  }
};

struct RevDecomposition {
  std::array<int, 3> counts = {1, 1, 1};
  std::vector<RevBox> revs;

  int rev_index(int jx, int jy, int jz) const {
    return jx + counts[0] * (jy + counts[1] * jz);
  }
  /// REV owning a grid cell (exact integer arithmetic).
  int rev_of_cell(const UniformGrid& grid, int cell) const {
    auto [i, j, k] = grid.unflat(cell);
    int jx = i / (grid.n[0] / counts[0]);
    int jy = j / (grid.n[1] / counts[1]);
    int jz = k / (grid.n[2] / counts[2]);
    return rev_index(jx, jy, jz);
  }
};

/// Interior terminals of the large-vessel subgraph: degree-1 nodes of the
/// I_L subgraph, strictly inside the domain box, with at least one incident
/// capillary segment.
std::vector<int> large_vessel_terminals(const VascularNetwork& net, const std::set<int>& I_L,
                                        const Box3& domain);

/// Partitions the grid into counts[0] x counts[1] x counts[2] REV boxes whose
/// faces align with cell faces. Segment membership uses exact segment/box
/// clipping (positive overlap length or an endpoint in the closed box).
RevDecomposition decompose_revs(const UniformGrid& grid, std::array<int, 3> counts,
                                const VascularNetwork& net, const std::set<int>& I_C,
                                const std::set<int>& I_L);

}  // namespace mvf

#endif
