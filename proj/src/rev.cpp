#include "mvf/rev.hpp"

#include <string>

#include "mvf/errors.hpp"

namespace mvf {

std::vector<int> large_vessel_terminals(const VascularNetwork& net, const std::set<int>& I_L,
                                        const Box3& domain) {
  std::vector<int> large_degree(net.nodes.size(), 0);
  std::vector<int> cap_degree(net.nodes.size(), 0);
  for (const auto& s : net.segments) {
    if (I_L.count(s.id)) {
      large_degree[s.n1]++;
      large_degree[s.n2]++;
    } else {
      cap_degree[s.n1]++;
      cap_degree[s.n2]++;
    }
  }
  std::vector<int> terminals;
  for (const auto& nd : net.nodes) {
    if (large_degree[nd.id] == 1 && cap_degree[nd.id] >= 1 &&
        domain.strictly_inside(nd.position))
      terminals.push_back(nd.id);
  }
  return terminals;
}

RevDecomposition decompose_revs(const UniformGrid& grid, std::array<int, 3> counts,
                                const VascularNetwork& net, const std::set<int>& I_C,
                                const std::set<int>& I_L) {
  for (int ax = 0; ax < 3; ++ax) {
    if (counts[ax] < 1)
      throw ValidationError("decompose_revs: REV counts must be at least 1");
    if (grid.n[ax] % counts[ax] != 0)
      throw ValidationError("decompose_revs: REV counts must divide the grid cell counts "
                            "(axis " + std::to_string(ax) + ": " + std::to_string(grid.n[ax]) +
                            " cells, " + std::to_string(counts[ax]) + " REVs)");
  }

  RevDecomposition dec;
  dec.counts = counts;
  std::array<int, 3> cells_per = {grid.n[0] / counts[0], grid.n[1] / counts[1],
                                  grid.n[2] / counts[2]};

  for (int jz = 0; jz < counts[2]; ++jz)
    for (int jy = 0; jy < counts[1]; ++jy)
      for (int jx = 0; jx < counts[0]; ++jx) {
        RevBox rev;
        rev.id = dec.rev_index(jx, jy, jz);
        std::array<int, 3> j = {jx, jy, jz};
        for (int ax = 0; ax < 3; ++ax) {
          rev.cell_lo[ax] = j[ax] * cells_per[ax];
          rev.cell_hi[ax] = (j[ax] + 1) * cells_per[ax] - 1;
          rev.box.lo[ax] = grid.origin[ax] + rev.cell_lo[ax] * grid.spacing(ax);
          rev.box.hi[ax] = grid.origin[ax] + (rev.cell_hi[ax] + 1) * grid.spacing(ax);
        }
        dec.revs.push_back(rev);
      }

  for (int sid : I_C) {
    const Segment& s = net.segments.at(sid);
    const Vec3& a = net.nodes[s.n1].position;
    const Vec3& b = net.nodes[s.n2].position;
    for (auto& rev : dec.revs)
      if (segment_meets_box(a, b, rev.box)) rev.capillary_segment_ids.insert(sid);
  }

  for (int nid : large_vessel_terminals(net, I_L, grid.box())) {
    int cell = grid.cell_of_flat(net.nodes[nid].position);
    dec.revs[dec.rev_of_cell(grid, cell)].large_terminal_node_ids.insert(nid);
  }
  return dec;
}

}  // namespace mvf
