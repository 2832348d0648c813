#ifndef MVF_DARCY_HPP
#define MVF_DARCY_HPP

#include <array>
#include <functional>
#include <vector>

#include "mvf/grid.hpp"
#include "mvf/sparse.hpp"

namespace mvf {

enum class BoundaryKind { no_flow, dirichlet };

/// Per-domain-face boundary condition: no-flow, or a Dirichlet value field
/// evaluated at face centers.
struct FaceCondition {
  BoundaryKind kind = BoundaryKind::no_flow;
  std::function<double(const Vec3&)> value;  // used when kind == dirichlet
};

/// Heterogeneous diagonal-tensor Darcy problem on the uniform grid:
///   -div(mobility grad p) + reaction p = source
/// mobility = (rho/mu) K per cell [kg/(Pa s m)], reaction [kg/(Pa s m^3)],
/// source [kg/(s m^3)].
struct DarcyProblem {
  UniformGrid grid;
  std::vector<Vec3> mobility;          // per cell, diagonal entries
  std::array<FaceCondition, 6> boundary;  // -x,+x,-y,+y,-z,+z
  std::vector<double> reaction;        // per cell, may be empty (= 0)
  std::vector<double> source;          // per cell, may be empty (= 0)

  void validate() const;
};

/// Harmonic-mean two-point transmissibility between adjacent cells [kg/(Pa s)].
double tpfa_transmissibility(const DarcyProblem& prob, int cellA, int cellB, int axis);

/// Half-cell transmissibility from a boundary cell to its domain face.
double tpfa_boundary_transmissibility(const DarcyProblem& prob, int cell, int axis);

struct DarcySystem {
  SparseMatrix A;
  std::vector<double> rhs;
};

/// Seven-point conservative stencil; Dirichlet faces via half-cell
/// transmissibilities, reaction on the diagonal, sources on the RHS.
/// Throws SingularSystemError when the problem is pure-Neumann without
/// reaction.
DarcySystem assemble_darcy(const DarcyProblem& prob);

/// Same stencil written into an existing system at a row/column offset.
/// Coupled assemblers use this and provide their own solvability terms, so
/// the pure-Neumann check is skipped.
void assemble_darcy_into(const DarcyProblem& prob, SparseMatrix& A, std::vector<double>& rhs,
                         int offset);

std::vector<double> solve_darcy(const DarcyProblem& prob, const SolveOptions& opts = {});

/// Identifies one boundary face of a boundary cell.
struct BoundaryFace {
  int cell;
  int axis;
  int side;  // 0 = low face, 1 = high face
};

/// Flux through a boundary face, positive into the domain [kg/s]. Zero on
/// no-flow faces.
double face_flux(const DarcyProblem& prob, const std::vector<double>& solution,
                 const BoundaryFace& face);

/// Flux through the interior face between two adjacent cells, positive from
/// cellA to cellB [kg/s].
double interior_face_flux(const DarcyProblem& prob, const std::vector<double>& solution,
                          int cellA, int cellB, int axis);

/// All boundary faces of the grid (each boundary cell contributes one entry
/// per domain face it touches).
std::vector<BoundaryFace> boundary_faces(const UniformGrid& grid);

Vec3 boundary_face_center(const UniformGrid& grid, const BoundaryFace& face);

}  // namespace mvf

#endif
