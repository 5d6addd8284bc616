#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mplg {

using Vector = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// Sparse matrix in compressed row storage with sorted column indices.
/// Symmetric operators are stored in full (both triangles) so that spmv is a
/// plain row sweep with a deterministic summation order.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols, std::vector<int> row_offsets,
               std::vector<int> column_indices, std::vector<double> values);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }

  std::span<const int> row_offsets() const { return row_offsets_; }
  std::span<const int> column_indices() const { return column_indices_; }
  std::span<const double> values() const { return values_; }

  /// Entry lookup by binary search; absent entries read as 0.
  double coeff(int i, int j) const;

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> diagonal() const;
  bool is_symmetric() const;  // exact comparison of stored entries

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_offsets_;
  std::vector<int> column_indices_;
  std::vector<double> values_;
};

/// Incremental builder: fix the sparsity pattern from element dof lists, then
/// accumulate entries in whatever order assembly visits them.
class SparseBuilder {
 public:
  SparseBuilder(int rows, int cols);

  /// Declare the dense coupling block of one element (all pairs i, j).
  void reserve_block(std::span<const int> dofs);
  /// Freeze the pattern; add() is only valid afterwards.
  void finalize_pattern();
  void add(int i, int j, double value);
  SparseMatrix build();

 private:
  int rows_;
  int cols_;
  bool finalized_ = false;
  std::vector<std::vector<int>> pattern_;  // per-row column sets, sorted later
  std::vector<int> row_offsets_;
  std::vector<int> column_indices_;
  std::vector<double> values_;
};

Vector spmv(const SparseMatrix& a, const Vector& x);

enum class Preconditioner { None, Jacobi };

struct CgResult {
  Vector x;
  int iterations = 0;
  double relative_residual = 0.0;
};

struct CgFailure : std::runtime_error {
  CgFailure(const std::string& what, double residual)
      : std::runtime_error(what), final_residual(residual) {}
  double final_residual;
};

/// Preconditioned conjugate gradients for a symmetric positive definite
/// matrix. Stops when ||b - A x|| / ||b|| <= tol; throws CgFailure with the
/// final residual when max_iter is exhausted. An optional initial guess warms
/// up the iteration.
CgResult cg_solve(const SparseMatrix& a, const Vector& b, double tol,
                  int max_iter, Preconditioner precond,
                  const Vector* initial_guess = nullptr);

}  // namespace mplg
