#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mplg/linalg.hpp"
#include "mplg/mesh.hpp"
#include "mplg/quadrature.hpp"
#include "mplg/types.hpp"

namespace mplg {

/// Continuous P_k Lagrange space (k = 1 or 2) on a structured simplicial
/// mesh. Degrees of freedom sit on the refined lattice with k*N+1 points per
/// axis and are numbered lexicographically, which makes the assembled
/// operators and all downstream tables deterministic.
class FESpace {
 public:
  FESpace(const Mesh& mesh, int degree);

  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return degree_; }
  int dof_count() const { return dof_count_; }
  int dofs_per_cell() const { return dofs_per_cell_; }
  std::span<const int> cell_dofs(int cell) const;
  const Point& dof_point(int dof) const { return dof_points_[dof]; }
  const std::vector<Point>& dof_points() const { return dof_points_; }

  /// Values of the local shape functions at a barycentric point (valid for
  /// extrapolated coordinates as well; the basis is polynomial).
  void shape_values(std::span<const double> bary, double* values) const;
  /// Physical gradients of the local shape functions on one cell.
  void shape_gradients(int cell, std::span<const double> bary,
                       Point* gradients) const;

 private:
  const Mesh* mesh_;
  int degree_;
  int dofs_per_cell_;
  int dof_count_;
  std::vector<int> cell_dofs_;
  std::vector<Point> dof_points_;
  std::vector<std::array<Point, 4>> lambda_gradients_;  // per sub-simplex type

  void build_dofs();
  void build_lambda_gradients();
};

struct FEFunction {
  const FESpace* space = nullptr;
  Vector coeffs;
};

/// Lagrange interpolation: coefficients are point values at the dof nodes.
FEFunction interpolate(const FESpace& space,
                       const std::function<double(const Point&)>& f);

/// Value of the piecewise polynomial at a located point; for loc.inside ==
/// false this is the polynomial extension of the located cell.
double evaluate(const FEFunction& fun, const CellLocation& loc);

SparseMatrix assemble_mass(const FESpace& space);
/// Stiffness without the viscosity factor; the system former scales by nu.
SparseMatrix assemble_stiffness(const FESpace& space);

/// Load vector b_i = (f(t), psi_i) + [g(t), psi_i]_Gamma. Either closure may
/// be empty, in which case its contribution is skipped.
Vector assemble_load(const FESpace& space,
                     const std::function<double(const Point&, double)>& f,
                     const std::function<double(const Point&, double)>& g,
                     double t);

struct NormPair {
  double l2 = 0.0;
  double h1_semi = 0.0;
};

/// sqrt(c^T M c) and sqrt(c^T K c) with freshly assembled operators; the
/// solver paths use their cached matrices instead.
NormPair discrete_norms(const FEFunction& fun);

}  // namespace mplg
