#ifndef MVF_SPARSE_HPP
#define MVF_SPARSE_HPP

#include <string>
#include <vector>

#include "mvf/errors.hpp"

namespace mvf {

/// Sparse square matrix built from (row, col, value) triplets and finalized
/// into compressed-row storage. Duplicate triplets accumulate on finalize.
class SparseMatrix {
 public:
  explicit SparseMatrix(int dimension = 0) : dim_(dimension) {}

  int dim() const { return dim_; }
  bool finalized() const { return finalized_; }

  void add(int row, int col, double value);
  void finalize();

  static SparseMatrix from_csr(int dim, std::vector<int> row_ptr, std::vector<int> col_idx,
                               std::vector<double> values);

  double multiply_row(int row, const std::vector<double>& x) const;
  void multiply(const std::vector<double>& x, std::vector<double>& y) const;
  std::vector<double> diagonal() const;

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

 private:
  int dim_ = 0;
  bool finalized_ = false;
  std::vector<int> t_row_, t_col_;
  std::vector<double> t_val_;
  std::vector<int> row_ptr_, col_idx_;
  std::vector<double> values_;
};

enum class Preconditioner { none, jacobi, ilu0 };

struct SolveOptions {
  double tol = 1e-10;             // relative residual target
  int max_iter = 0;               // 0 -> 10 * dimension
  Preconditioner precond = Preconditioner::jacobi;
  // Row/column inf-norm scaling before the Krylov loop; the coupled block
  // systems mix entry magnitudes across ~14 orders of magnitude.
  bool equilibrate = true;
};

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Preconditioned BiCGSTAB. Guarantees ||Ax - b||_2 <= tol * ||b||_2 on
/// return (explicitly recomputed); throws SolveError with the residual
/// history on breakdown or iteration exhaustion.
std::vector<double> solve(const SparseMatrix& A, const std::vector<double>& b,
                          const SolveOptions& opts = {}, SolveStats* stats = nullptr);

/// MatrixMarket coordinate-format dump for debugging.
void write_matrix_market(const SparseMatrix& A, const std::string& path);

}  // namespace mvf

#endif
