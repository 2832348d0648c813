#include "mvf/darcy.hpp"

#include <cmath>

namespace mvf {

void DarcyProblem::validate() const {
  if (static_cast<int>(mobility.size()) != grid.num_cells())
    throw ValidationError("darcy: mobility must have one diagonal tensor per cell");
  for (const auto& m : mobility)
    if (m.x <= 0.0 || m.y <= 0.0 || m.z <= 0.0)
      throw ValidationError("darcy: mobility diagonal entries must be positive");
  if (!reaction.empty() && static_cast<int>(reaction.size()) != grid.num_cells())
    throw ValidationError("darcy: reaction size mismatch");
  if (!source.empty() && static_cast<int>(source.size()) != grid.num_cells())
    throw ValidationError("darcy: source size mismatch");
  for (int f = 0; f < 6; ++f)
    if (boundary[f].kind == BoundaryKind::dirichlet && !boundary[f].value)
      throw ValidationError("darcy: Dirichlet face without a value field");
}

double tpfa_transmissibility(const DarcyProblem& prob, int cellA, int cellB, int axis) {
  double ma = prob.mobility[cellA][axis];
  double mb = prob.mobility[cellB][axis];
  double harm = 2.0 * ma * mb / (ma + mb);
  return prob.grid.face_area(axis) * harm / prob.grid.spacing(axis);
}

double tpfa_boundary_transmissibility(const DarcyProblem& prob, int cell, int axis) {
  // Half-cell distance between the cell center and the face.
  return prob.grid.face_area(axis) * prob.mobility[cell][axis] / (0.5 * prob.grid.spacing(axis));
}

std::vector<BoundaryFace> boundary_faces(const UniformGrid& grid) {
  std::vector<BoundaryFace> faces;
  for (int c = 0; c < grid.num_cells(); ++c) {
    auto [i, j, k] = grid.unflat(c);
    if (i == 0) faces.push_back({c, 0, 0});
    if (i == grid.n[0] - 1) faces.push_back({c, 0, 1});
    if (j == 0) faces.push_back({c, 1, 0});
    if (j == grid.n[1] - 1) faces.push_back({c, 1, 1});
    if (k == 0) faces.push_back({c, 2, 0});
    if (k == grid.n[2] - 1) faces.push_back({c, 2, 1});
  }
  return faces;
}

Vec3 boundary_face_center(const UniformGrid& grid, const BoundaryFace& face) {
  Vec3 c = grid.cell_center(face.cell);
  c[face.axis] += (face.side == 1 ? 0.5 : -0.5) * grid.spacing(face.axis);
  return c;
}

void assemble_darcy_into(const DarcyProblem& prob, SparseMatrix& A, std::vector<double>& rhs,
                         int offset) {
  prob.validate();
  const UniformGrid& g = prob.grid;
  int n = g.num_cells();
  double vol = g.cell_volume();

  for (int c = 0; c < n; ++c) {
    auto [i, j, k] = g.unflat(c);
    int idx[3] = {i, j, k};
    for (int ax = 0; ax < 3; ++ax) {
      // high-side interior neighbor (low side covered from the other cell)
      if (idx[ax] + 1 < g.n[ax]) {
        int nb = ax == 0 ? g.flat(i + 1, j, k) : (ax == 1 ? g.flat(i, j + 1, k) : g.flat(i, j, k + 1));
        double T = tpfa_transmissibility(prob, c, nb, ax);
        A.add(offset + c, offset + c, T);
        A.add(offset + c, offset + nb, -T);
        A.add(offset + nb, offset + nb, T);
        A.add(offset + nb, offset + c, -T);
      }
      for (int side = 0; side < 2; ++side) {
        bool on = side == 0 ? idx[ax] == 0 : idx[ax] == g.n[ax] - 1;
        if (!on) continue;
        const FaceCondition& bc = prob.boundary[2 * ax + side];
        if (bc.kind != BoundaryKind::dirichlet) continue;
        double T = tpfa_boundary_transmissibility(prob, c, ax);
        A.add(offset + c, offset + c, T);
        rhs[offset + c] += T * bc.value(boundary_face_center(g, {c, ax, side}));
      }
    }
    if (!prob.reaction.empty() && prob.reaction[c] != 0.0)
      A.add(offset + c, offset + c, prob.reaction[c] * vol);
    if (!prob.source.empty() && prob.source[c] != 0.0) rhs[offset + c] += prob.source[c] * vol;
  }
}

DarcySystem assemble_darcy(const DarcyProblem& prob) {
  prob.validate();
  bool any_dirichlet = false;
  for (const auto& bc : prob.boundary) any_dirichlet |= bc.kind == BoundaryKind::dirichlet;
  bool any_reaction = false;
  for (double r : prob.reaction) any_reaction |= r > 0.0;
  if (!any_dirichlet && !any_reaction)
    throw SingularSystemError(
        "darcy: pure-Neumann problem without reaction is singular (constant nullspace)");

  DarcySystem sys;
  sys.A = SparseMatrix(prob.grid.num_cells());
  sys.rhs.assign(prob.grid.num_cells(), 0.0);
  assemble_darcy_into(prob, sys.A, sys.rhs, 0);
  sys.A.finalize();
  return sys;
}

std::vector<double> solve_darcy(const DarcyProblem& prob, const SolveOptions& opts) {
  DarcySystem sys = assemble_darcy(prob);
  return solve(sys.A, sys.rhs, opts);
}

double face_flux(const DarcyProblem& prob, const std::vector<double>& solution,
                 const BoundaryFace& face) {
  const FaceCondition& bc = prob.boundary[2 * face.axis + face.side];
  if (bc.kind == BoundaryKind::no_flow) return 0.0;
  double T = tpfa_boundary_transmissibility(prob, face.cell, face.axis);
  double pd = bc.value(boundary_face_center(prob.grid, face));
  return T * (pd - solution[face.cell]);  // positive into the domain
}

double interior_face_flux(const DarcyProblem& prob, const std::vector<double>& solution,
                          int cellA, int cellB, int axis) {
  double T = tpfa_transmissibility(prob, cellA, cellB, axis);
  return T * (solution[cellA] - solution[cellB]);
}

}  // namespace mvf
