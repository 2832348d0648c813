#include "mvf/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numeric>

namespace mvf {

void SparseMatrix::add(int row, int col, double value) {
  if (finalized_) throw Error("SparseMatrix: add after finalize");
  if (row < 0 || row >= dim_ || col < 0 || col >= dim_)
    throw Error("SparseMatrix: triplet index out of range");
  t_row_.push_back(row);
  t_col_.push_back(col);
  t_val_.push_back(value);
}

void SparseMatrix::finalize() {
  if (finalized_) return;
  std::vector<int> order(t_row_.size());
  std::iota(order.begin(), order.end(), 0);
  // stable: duplicates accumulate in insertion order, keeping assembly
  // bit-reproducible across equivalent assemblers
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return t_row_[a] != t_row_[b] ? t_row_[a] < t_row_[b] : t_col_[a] < t_col_[b];
  });

  row_ptr_.assign(dim_ + 1, 0);
  col_idx_.clear();
  values_.clear();
  int last_r = -1, last_c = -1;
  for (int idx : order) {
    int r = t_row_[idx], c = t_col_[idx];
    if (r == last_r && c == last_c) {
      values_.back() += t_val_[idx];  // accumulate duplicate entry
    } else {
      col_idx_.push_back(c);
      values_.push_back(t_val_[idx]);
      row_ptr_[r + 1]++;
      last_r = r;
      last_c = c;
    }
  }
  for (int r = 0; r < dim_; ++r) row_ptr_[r + 1] += row_ptr_[r];
  for (double v : values_)
    if (!std::isfinite(v)) throw Error("SparseMatrix: non-finite entry after finalize");
  t_row_.clear();
  t_col_.clear();
  t_val_.clear();
  finalized_ = true;
}

double SparseMatrix::multiply_row(int row, const std::vector<double>& x) const {
  double acc = 0.0;
  for (int p = row_ptr_[row]; p < row_ptr_[row + 1]; ++p) acc += values_[p] * x[col_idx_[p]];
  return acc;
}

void SparseMatrix::multiply(const std::vector<double>& x, std::vector<double>& y) const {
  for (int r = 0; r < dim_; ++r) y[r] = multiply_row(r, x);
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(dim_, 0.0);
  for (int r = 0; r < dim_; ++r)
    for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
      if (col_idx_[p] == r) d[r] = values_[p];
  return d;
}

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Zero-fill incomplete LU on the CSR pattern (IKJ variant); L has unit
// diagonal, both factors share the matrix sparsity.
struct Ilu0 {
  std::vector<int> row_ptr, col_idx, diag_ptr;
  std::vector<double> val;

  explicit Ilu0(const SparseMatrix& A)
      : row_ptr(A.row_ptr()), col_idx(A.col_idx()), val(A.values()) {
    int n = A.dim();
    diag_ptr.assign(n, -1);
    for (int r = 0; r < n; ++r)
      for (int p = row_ptr[r]; p < row_ptr[r + 1]; ++p)
        if (col_idx[p] == r) diag_ptr[r] = p;
    for (int r = 0; r < n; ++r)
      if (diag_ptr[r] < 0) throw SingularSystemError("ILU(0): missing diagonal entry");

    for (int i = 1; i < n; ++i) {
      for (int p = row_ptr[i]; p < row_ptr[i + 1] && col_idx[p] < i; ++p) {
        int k = col_idx[p];
        double piv = val[diag_ptr[k]];
        if (piv == 0.0) throw SingularSystemError("ILU(0): zero pivot");
        double factor = val[p] / piv;
        val[p] = factor;
        for (int q = diag_ptr[k] + 1; q < row_ptr[k + 1]; ++q) {
          int col = col_idx[q];
          // find col in row i within [p+1, end)
          for (int t = p + 1; t < row_ptr[i + 1]; ++t) {
            if (col_idx[t] == col) {
              val[t] -= factor * val[q];
              break;
            }
            if (col_idx[t] > col) break;
          }
        }
      }
    }
  }

  void apply(const std::vector<double>& r, std::vector<double>& z) const {
    int n = static_cast<int>(diag_ptr.size());
    // forward solve L y = r
    for (int i = 0; i < n; ++i) {
      double s = r[i];
      for (int p = row_ptr[i]; p < row_ptr[i + 1] && col_idx[p] < i; ++p)
        s -= val[p] * z[col_idx[p]];
      z[i] = s;
    }
    // backward solve U z = y
    for (int i = n - 1; i >= 0; --i) {
      double s = z[i];
      for (int p = row_ptr[i + 1] - 1; p > diag_ptr[i]; --p) s -= val[p] * z[col_idx[p]];
      z[i] = s / val[diag_ptr[i]];
    }
  }
};

}  // namespace

namespace {

std::vector<double> bicgstab(const SparseMatrix& A, const std::vector<double>& b,
                             const SolveOptions& opts, SolveStats* stats) {
  int n = A.dim();
  double bnorm = norm2(b);
  std::vector<double> x(n, 0.0);
  if (bnorm == 0.0) {
    if (stats) *stats = {0, 0.0};
    return x;
  }

  std::vector<double> diag;
  std::unique_ptr<Ilu0> ilu;
  if (opts.precond == Preconditioner::jacobi) {
    diag = A.diagonal();
    for (int i = 0; i < n; ++i)
      if (diag[i] == 0.0)
        throw SingularSystemError("solve: zero diagonal entry (row " + std::to_string(i) + ")");
  } else if (opts.precond == Preconditioner::ilu0) {
    ilu = std::make_unique<Ilu0>(A);
  }
  auto precondition = [&](const std::vector<double>& r, std::vector<double>& z) {
    if (ilu)
      ilu->apply(r, z);
    else if (!diag.empty())
      for (int i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    else
      z = r;
  };

  int max_iter = opts.max_iter > 0 ? opts.max_iter : 10 * n;
  std::vector<double> history;
  history.reserve(64);

  std::vector<double> r(n), r0(n), p(n, 0.0), v(n, 0.0), s(n), t(n), phat(n), shat(n), tmp(n);
  A.multiply(x, tmp);
  for (int i = 0; i < n; ++i) r[i] = b[i] - tmp[i];
  r0 = r;
  double rho_prev = 1.0, alpha = 1.0, omega = 1.0;
  double resid = norm2(r) / bnorm;
  history.push_back(resid);

  int it = 0;
  while (resid > opts.tol) {
    if (it >= max_iter)
      throw SolveError("solve: BiCGSTAB reached max_iter with relative residual " +
                           std::to_string(resid),
                       history);
    double rho = dot(r0, r);
    if (rho == 0.0)
      throw SolveError("solve: BiCGSTAB breakdown (rho = 0) at relative residual " +
                           std::to_string(resid),
                       history);
    if (it == 0) {
      p = r;
    } else {
      double beta = (rho / rho_prev) * (alpha / omega);
      for (int i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    }
    precondition(p, phat);
    A.multiply(phat, v);
    double r0v = dot(r0, v);
    if (r0v == 0.0)
      throw SolveError("solve: BiCGSTAB breakdown (r0.v = 0)", history);
    alpha = rho / r0v;
    for (int i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (norm2(s) / bnorm <= opts.tol) {
      for (int i = 0; i < n; ++i) x[i] += alpha * phat[i];
      A.multiply(x, tmp);
      for (int i = 0; i < n; ++i) r[i] = b[i] - tmp[i];
      resid = norm2(r) / bnorm;
      history.push_back(resid);
      ++it;
      continue;
    }
    precondition(s, shat);
    A.multiply(shat, t);
    double tt = dot(t, t);
    if (tt == 0.0) throw SolveError("solve: BiCGSTAB breakdown (t = 0)", history);
    omega = dot(t, s) / tt;
    if (omega == 0.0) throw SolveError("solve: BiCGSTAB breakdown (omega = 0)", history);
    for (int i = 0; i < n; ++i) x[i] += alpha * phat[i] + omega * shat[i];
    for (int i = 0; i < n; ++i) r[i] = s[i] - omega * t[i];
    rho_prev = rho;
    resid = norm2(r) / bnorm;
    history.push_back(resid);
    ++it;

    // Guard against residual drift: confirm with the true residual once the
    // recursive one reports convergence.
    if (resid <= opts.tol) {
      A.multiply(x, tmp);
      for (int i = 0; i < n; ++i) r[i] = b[i] - tmp[i];
      resid = norm2(r) / bnorm;
      history.back() = resid;
    }
  }

  if (stats) *stats = {it, resid};
  return x;
}

}  // namespace

SparseMatrix SparseMatrix::from_csr(int dim, std::vector<int> row_ptr,
                                    std::vector<int> col_idx, std::vector<double> values) {
  SparseMatrix m(dim);
  m.row_ptr_ = std::move(row_ptr);
  m.col_idx_ = std::move(col_idx);
  m.values_ = std::move(values);
  m.finalized_ = true;
  return m;
}

std::vector<double> solve(const SparseMatrix& A, const std::vector<double>& b,
                          const SolveOptions& opts, SolveStats* stats) {
  if (!A.finalized()) throw Error("solve: matrix not finalized");
  int n = A.dim();
  if (static_cast<int>(b.size()) != n) throw Error("solve: dimension mismatch");
  if (opts.tol <= 0.0 || opts.tol >= 1.0) throw Error("solve: tol must lie in (0,1)");

  if (!opts.equilibrate) return bicgstab(A, b, opts, stats);

  // Two-sided inf-norm scaling: solve (Dr A Dc) y = Dr b, x = Dc y.
  std::vector<double> row_scale(n, 1.0), col_scale(n, 1.0);
  for (int r = 0; r < n; ++r) {
    double m = 0.0;
    for (int p = A.row_ptr()[r]; p < A.row_ptr()[r + 1]; ++p)
      m = std::max(m, std::abs(A.values()[p]));
    if (m > 0.0) row_scale[r] = 1.0 / m;
  }
  std::vector<double> col_max(n, 0.0);
  for (int r = 0; r < n; ++r)
    for (int p = A.row_ptr()[r]; p < A.row_ptr()[r + 1]; ++p)
      col_max[A.col_idx()[p]] =
          std::max(col_max[A.col_idx()[p]], row_scale[r] * std::abs(A.values()[p]));
  for (int c = 0; c < n; ++c)
    if (col_max[c] > 0.0) col_scale[c] = 1.0 / col_max[c];

  std::vector<double> scaled_vals(A.values().size());
  for (int r = 0; r < n; ++r)
    for (int p = A.row_ptr()[r]; p < A.row_ptr()[r + 1]; ++p)
      scaled_vals[p] = row_scale[r] * A.values()[p] * col_scale[A.col_idx()[p]];
  SparseMatrix As = SparseMatrix::from_csr(n, A.row_ptr(), A.col_idx(), std::move(scaled_vals));
  std::vector<double> bs(n);
  for (int r = 0; r < n; ++r) bs[r] = row_scale[r] * b[r];

  double bnorm = norm2(b);
  SolveOptions inner = opts;
  inner.equilibrate = false;
  SolveStats total_stats;
  std::vector<double> x(n, 0.0);
  for (int attempt = 0; attempt < 3; ++attempt) {
    SolveStats st;
    std::vector<double> y = bicgstab(As, bs, inner, &st);
    total_stats.iterations += st.iterations;
    for (int c = 0; c < n; ++c) x[c] = col_scale[c] * y[c];
    if (bnorm == 0.0) {
      total_stats.relative_residual = 0.0;
      if (stats) *stats = total_stats;
      return x;
    }
    std::vector<double> r(n);
    A.multiply(x, r);
    double rn = 0.0;
    for (int i = 0; i < n; ++i) rn += (b[i] - r[i]) * (b[i] - r[i]);
    double rel = std::sqrt(rn) / bnorm;
    total_stats.relative_residual = rel;
    if (rel <= opts.tol) {
      if (stats) *stats = total_stats;
      return x;
    }
    inner.tol = std::max(inner.tol * 1e-2, 1e-15);  // tighten and retry
  }
  throw SolveError("solve: equilibrated solve met the scaled tolerance but not the "
                   "original-system tolerance (relative residual " +
                       std::to_string(total_stats.relative_residual) + ")",
                   {total_stats.relative_residual});
}

void write_matrix_market(const SparseMatrix& A, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << "%%MatrixMarket matrix coordinate real general\n";
  size_t nnz = A.values().size();
  out << A.dim() << " " << A.dim() << " " << nnz << "\n";
  char buf[64];
  for (int r = 0; r < A.dim(); ++r)
    for (int p = A.row_ptr()[r]; p < A.row_ptr()[r + 1]; ++p) {
      std::snprintf(buf, sizeof buf, "%d %d %.17g\n", r + 1, A.col_idx()[p] + 1, A.values()[p]);
      out << buf;
    }
}

}  // namespace mvf
