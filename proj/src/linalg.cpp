#include "mplg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace mplg {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<int> row_offsets,
                           std::vector<int> column_indices,
                           std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      column_indices_(std::move(column_indices)),
      values_(std::move(values)) {
  if (static_cast<int>(row_offsets_.size()) != rows_ + 1)
    throw std::invalid_argument("SparseMatrix: bad row offsets");
  if (column_indices_.size() != values_.size())
    throw std::invalid_argument("SparseMatrix: indices/values size mismatch");
}

double SparseMatrix::coeff(int i, int j) const {
  auto begin = column_indices_.begin() + row_offsets_[i];
  auto end = column_indices_.begin() + row_offsets_[i + 1];
  auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - column_indices_.begin())];
}

void SparseMatrix::multiply(std::span<const double> x,
                            std::span<double> y) const {
  if (static_cast<int>(x.size()) != cols_ ||
      static_cast<int>(y.size()) != rows_)
    throw std::invalid_argument("SparseMatrix::multiply: dimension mismatch");
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
      s += values_[k] * x[column_indices_[k]];
    y[i] = s;
  }
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(rows_, 0.0);
  for (int i = 0; i < rows_; ++i) d[i] = coeff(i, i);
  return d;
}

bool SparseMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  for (int i = 0; i < rows_; ++i)
    for (int k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
      if (values_[k] != coeff(column_indices_[k], i)) return false;
  return true;
}

SparseBuilder::SparseBuilder(int rows, int cols)
    : rows_(rows), cols_(cols), pattern_(rows) {}

void SparseBuilder::reserve_block(std::span<const int> dofs) {
  for (int i : dofs)
    for (int j : dofs) pattern_[i].push_back(j);
}

void SparseBuilder::finalize_pattern() {
  row_offsets_.assign(rows_ + 1, 0);
  for (int i = 0; i < rows_; ++i) {
    auto& cols = pattern_[i];
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    row_offsets_[i + 1] = row_offsets_[i] + static_cast<int>(cols.size());
  }
  column_indices_.reserve(row_offsets_[rows_]);
  for (auto& cols : pattern_)
    column_indices_.insert(column_indices_.end(), cols.begin(), cols.end());
  values_.assign(column_indices_.size(), 0.0);
  pattern_.clear();
  pattern_.shrink_to_fit();
  finalized_ = true;
}

void SparseBuilder::add(int i, int j, double value) {
  auto begin = column_indices_.begin() + row_offsets_[i];
  auto end = column_indices_.begin() + row_offsets_[i + 1];
  auto it = std::lower_bound(begin, end, j);
  values_[static_cast<std::size_t>(it - column_indices_.begin())] += value;
}

SparseMatrix SparseBuilder::build() {
  return SparseMatrix(rows_, cols_, std::move(row_offsets_),
                      std::move(column_indices_), std::move(values_));
}

Vector spmv(const SparseMatrix& a, const Vector& x) {
  Vector y(a.rows(), 0.0);
  a.multiply(x, y);
  return y;
}

CgResult cg_solve(const SparseMatrix& a, const Vector& b, double tol,
                  int max_iter, Preconditioner precond,
                  const Vector* initial_guess) {
  const int n = a.rows();
  if (static_cast<int>(b.size()) != n)
    throw std::invalid_argument("cg_solve: dimension mismatch");

  const double norm_b = norm2(b);
  CgResult result;
  result.x.assign(n, 0.0);
  if (norm_b == 0.0) return result;  // exact solution of A x = 0

  std::vector<double> inv_diag;
  if (precond == Preconditioner::Jacobi) {
    inv_diag = a.diagonal();
    for (double& d : inv_diag) d = 1.0 / d;
  }

  Vector& x = result.x;
  Vector r(n), z(n), p(n), ap(n);
  if (initial_guess && static_cast<int>(initial_guess->size()) == n) {
    x = *initial_guess;
    a.multiply(x, r);
    for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
  } else {
    r = b;
  }

  auto apply_precond = [&](const Vector& in, Vector& out) {
    if (precond == Preconditioner::Jacobi)
      for (int i = 0; i < n; ++i) out[i] = inv_diag[i] * in[i];
    else
      out = in;
  };

  double res = norm2(r) / norm_b;
  if (res <= tol) {
    result.relative_residual = res;
    return result;
  }

  apply_precond(r, z);
  p = z;
  double rz = dot(r, z);

  for (int iter = 1; iter <= max_iter; ++iter) {
    a.multiply(p, ap);
    const double alpha = rz / dot(p, ap);
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    res = norm2(r) / norm_b;
    result.iterations = iter;
    if (res <= tol) {
      result.relative_residual = res;
      return result;
    }
    apply_precond(r, z);
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw CgFailure("cg_solve: no convergence within " +
                      std::to_string(max_iter) +
                      " iterations, relative residual " + std::to_string(res),
                  res);
}

}  // namespace mplg
