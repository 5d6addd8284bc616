#include "mplg/fem.hpp"

#include <cmath>
#include <stdexcept>

namespace mplg {

namespace {

// Local edge enumeration (vertex pairs) per dimension, fixed order.
constexpr std::array<std::array<int, 2>, 1> kEdges1d = {{{0, 1}}};
constexpr std::array<std::array<int, 2>, 3> kEdges2d = {{{0, 1}, {0, 2}, {1, 2}}};
constexpr std::array<std::array<int, 2>, 6> kEdges3d = {
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

std::span<const std::array<int, 2>> local_edges(int dim) {
  switch (dim) {
    case 1: return kEdges1d;
    case 2: return kEdges2d;
    default: return kEdges3d;
  }
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

FESpace::FESpace(const Mesh& mesh, int degree)
    : mesh_(&mesh), degree_(degree) {
  if (degree != 1 && degree != 2)
    throw std::invalid_argument("FESpace: degree must be 1 or 2");
  const int d = mesh.dim();
  dofs_per_cell_ =
      degree == 1 ? d + 1 : d + 1 + static_cast<int>(local_edges(d).size());
  build_dofs();
  build_lambda_gradients();
}

void FESpace::build_dofs() {
  const Mesh& mesh = *mesh_;
  const int d = mesh.dim();
  const int k = degree_;
  const int m = k * mesh.division() + 1;  // dof lattice points per axis
  dof_count_ = 1;
  for (int i = 0; i < d; ++i) dof_count_ *= m;

  dof_points_.resize(dof_count_);
  const double spacing = mesh.grid_h() / k;
  const int n1 = d >= 2 ? m : 1;
  const int n2 = d >= 3 ? m : 1;
  for (int i2 = 0; i2 < n2; ++i2)
    for (int i1 = 0; i1 < n1; ++i1)
      for (int i0 = 0; i0 < m; ++i0) {
        Point p = origin();
        p[0] = mesh.domain().lower[0] + spacing * i0;
        if (d >= 2) p[1] = mesh.domain().lower[1] + spacing * i1;
        if (d >= 3) p[2] = mesh.domain().lower[2] + spacing * i2;
        dof_points_[i0 + m * (i1 + m * i2)] = p;
      }

  auto lattice_dof = [m, d](const std::array<int, 3>& c) {
    int idx = c[0];
    if (d >= 2) idx += m * c[1];
    if (d >= 3) idx += m * m * c[2];
    return idx;
  };

  cell_dofs_.reserve(static_cast<std::size_t>(mesh.cell_count()) *
                     dofs_per_cell_);
  for (int cell = 0; cell < mesh.cell_count(); ++cell) {
    auto verts = mesh.cell_vertices(cell);
    std::array<std::array<int, 3>, 4> vc{};
    for (int v = 0; v < d + 1; ++v) {
      const auto& lat = mesh.vertex_lattice(verts[v]);
      vc[v] = {k * lat[0], k * lat[1], k * lat[2]};
      cell_dofs_.push_back(lattice_dof(vc[v]));
    }
    if (k == 2) {
      for (const auto& edge : local_edges(d)) {
        const std::array<int, 3> mid = {
            (vc[edge[0]][0] + vc[edge[1]][0]) / 2,
            (vc[edge[0]][1] + vc[edge[1]][1]) / 2,
            (vc[edge[0]][2] + vc[edge[1]][2]) / 2};
        cell_dofs_.push_back(lattice_dof(mid));
      }
    }
  }
}

void FESpace::build_lambda_gradients() {
  const Mesh& mesh = *mesh_;
  lambda_gradients_.resize(mesh.type_count());
  for (int t = 0; t < mesh.type_count(); ++t)
    for (int i = 0; i < mesh.dim() + 1; ++i)
      lambda_gradients_[t][i] = mesh.lambda_gradient(t, i);
}

std::span<const int> FESpace::cell_dofs(int cell) const {
  return {cell_dofs_.data() + static_cast<std::size_t>(cell) * dofs_per_cell_,
          static_cast<std::size_t>(dofs_per_cell_)};
}

void FESpace::shape_values(std::span<const double> bary,
                           double* values) const {
  const int d = mesh_->dim();
  if (degree_ == 1) {
    for (int i = 0; i < d + 1; ++i) values[i] = bary[i];
    return;
  }
  for (int i = 0; i < d + 1; ++i) values[i] = bary[i] * (2.0 * bary[i] - 1.0);
  int k = d + 1;
  for (const auto& edge : local_edges(d))
    values[k++] = 4.0 * bary[edge[0]] * bary[edge[1]];
}

void FESpace::shape_gradients(int cell, std::span<const double> bary,
                              Point* gradients) const {
  const int d = mesh_->dim();
  const auto& lg = lambda_gradients_[mesh_->cell_type(cell)];
  if (degree_ == 1) {
    for (int i = 0; i < d + 1; ++i) gradients[i] = lg[i];
    return;
  }
  for (int i = 0; i < d + 1; ++i) {
    const double f = 4.0 * bary[i] - 1.0;
    Point g = origin();
    for (int c = 0; c < d; ++c) g[c] = f * lg[i][c];
    gradients[i] = g;
  }
  int k = d + 1;
  for (const auto& edge : local_edges(d)) {
    Point g = origin();
    for (int c = 0; c < d; ++c)
      g[c] = 4.0 * (bary[edge[1]] * lg[edge[0]][c] +
                    bary[edge[0]] * lg[edge[1]][c]);
    gradients[k++] = g;
  }
}

FEFunction interpolate(const FESpace& space,
                       const std::function<double(const Point&)>& f) {
  FEFunction fun;
  fun.space = &space;
  fun.coeffs.resize(space.dof_count());
  for (int i = 0; i < space.dof_count(); ++i)
    fun.coeffs[i] = f(space.dof_point(i));
  return fun;
}

double evaluate(const FEFunction& fun, const CellLocation& loc) {
  const FESpace& space = *fun.space;
  double values[10];
  space.shape_values(
      std::span<const double>(loc.barycentric.data(), loc.barycentric.size()),
      values);
  auto dofs = space.cell_dofs(loc.cell_index);
  double sum = 0.0;
  for (int i = 0; i < space.dofs_per_cell(); ++i)
    sum += fun.coeffs[dofs[i]] * values[i];
  return sum;
}

SparseMatrix assemble_mass(const FESpace& space) {
  const Mesh& mesh = space.mesh();
  const QuadratureRule rule = simplex_rule(mesh.dim());
  const int nloc = space.dofs_per_cell();
  const double jac = factorial(mesh.dim()) * mesh.cell_volume();

  // shape values at the rule points are cell independent
  std::vector<std::array<double, 10>> table(rule.size());
  for (int q = 0; q < rule.size(); ++q)
    space.shape_values(std::span<const double>(rule.points[q].data(), 4),
                       table[q].data());

  SparseBuilder builder(space.dof_count(), space.dof_count());
  for (int cell = 0; cell < mesh.cell_count(); ++cell)
    builder.reserve_block(space.cell_dofs(cell));
  builder.finalize_pattern();

  std::vector<double> local(nloc * nloc);
  for (int cell = 0; cell < mesh.cell_count(); ++cell) {
    std::fill(local.begin(), local.end(), 0.0);
    for (int q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * jac;
      for (int i = 0; i < nloc; ++i)
        for (int j = i; j < nloc; ++j)
          local[i * nloc + j] += w * table[q][i] * table[q][j];
    }
    auto dofs = space.cell_dofs(cell);
    for (int i = 0; i < nloc; ++i)
      for (int j = i; j < nloc; ++j) {
        builder.add(dofs[i], dofs[j], local[i * nloc + j]);
        if (j != i) builder.add(dofs[j], dofs[i], local[i * nloc + j]);
      }
  }
  return builder.build();
}

SparseMatrix assemble_stiffness(const FESpace& space) {
  const Mesh& mesh = space.mesh();
  const int d = mesh.dim();
  const QuadratureRule rule = simplex_rule(d);
  const int nloc = space.dofs_per_cell();
  const double jac = factorial(d) * mesh.cell_volume();

  SparseBuilder builder(space.dof_count(), space.dof_count());
  for (int cell = 0; cell < mesh.cell_count(); ++cell)
    builder.reserve_block(space.cell_dofs(cell));
  builder.finalize_pattern();

  std::vector<double> local(nloc * nloc);
  std::vector<Point> grads(nloc);
  for (int cell = 0; cell < mesh.cell_count(); ++cell) {
    std::fill(local.begin(), local.end(), 0.0);
    for (int q = 0; q < rule.size(); ++q) {
      space.shape_gradients(
          cell, std::span<const double>(rule.points[q].data(), 4),
          grads.data());
      const double w = rule.weights[q] * jac;
      for (int i = 0; i < nloc; ++i)
        for (int j = i; j < nloc; ++j) {
          double g = 0.0;
          for (int c = 0; c < d; ++c) g += grads[i][c] * grads[j][c];
          local[i * nloc + j] += w * g;
        }
    }
    auto dofs = space.cell_dofs(cell);
    for (int i = 0; i < nloc; ++i)
      for (int j = i; j < nloc; ++j) {
        builder.add(dofs[i], dofs[j], local[i * nloc + j]);
        if (j != i) builder.add(dofs[j], dofs[i], local[i * nloc + j]);
      }
  }
  return builder.build();
}

Vector assemble_load(const FESpace& space,
                     const std::function<double(const Point&, double)>& f,
                     const std::function<double(const Point&, double)>& g,
                     double t) {
  const Mesh& mesh = space.mesh();
  const int d = mesh.dim();
  const int nloc = space.dofs_per_cell();
  Vector b(space.dof_count(), 0.0);

  if (f) {
    const QuadratureRule rule = simplex_rule(d);
    const double jac = factorial(d) * mesh.cell_volume();
    std::vector<std::array<double, 10>> table(rule.size());
    for (int q = 0; q < rule.size(); ++q)
      space.shape_values(std::span<const double>(rule.points[q].data(), 4),
                         table[q].data());
    for (int cell = 0; cell < mesh.cell_count(); ++cell) {
      auto verts = mesh.cell_vertices(cell);
      auto dofs = space.cell_dofs(cell);
      for (int q = 0; q < rule.size(); ++q) {
        Point x = origin();
        for (int v = 0; v < d + 1; ++v) {
          const Point& p = mesh.vertex(verts[v]);
          for (int i = 0; i < d; ++i) x[i] += rule.points[q][v] * p[i];
        }
        const double w = rule.weights[q] * jac * f(x, t);
        for (int i = 0; i < nloc; ++i) b[dofs[i]] += w * table[q][i];
      }
    }
  }

  if (g) {
    const QuadratureRule rule = facet_rule(d);
    const double fac = factorial(d - 1);
    std::vector<double> values(nloc);
    for (const auto& facet : mesh.boundary_facets()) {
      double measure = 1.0;
      if (d == 2) {
        const Point& a = mesh.vertex(facet.vertices[0]);
        const Point& bb = mesh.vertex(facet.vertices[1]);
        measure = std::hypot(bb[0] - a[0], bb[1] - a[1]);
      } else if (d == 3) {
        const Point& a = mesh.vertex(facet.vertices[0]);
        const Point& bb = mesh.vertex(facet.vertices[1]);
        const Point& c = mesh.vertex(facet.vertices[2]);
        const double u[3] = {bb[0] - a[0], bb[1] - a[1], bb[2] - a[2]};
        const double v[3] = {c[0] - a[0], c[1] - a[1], c[2] - a[2]};
        const double cx = u[1] * v[2] - u[2] * v[1];
        const double cy = u[2] * v[0] - u[0] * v[2];
        const double cz = u[0] * v[1] - u[1] * v[0];
        measure = 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
      }
      auto dofs = space.cell_dofs(facet.cell);
      for (int q = 0; q < rule.size(); ++q) {
        Point x = origin();
        for (int v = 0; v < facet.vertex_count; ++v) {
          const Point& p = mesh.vertex(facet.vertices[v]);
          for (int i = 0; i < d; ++i) x[i] += rule.points[q][v] * p[i];
        }
        const auto bary = mesh.barycentric(facet.cell, x);
        space.shape_values(std::span<const double>(bary.data(), 4),
                           values.data());
        const double w = fac * measure * rule.weights[q] * g(x, t);
        for (int i = 0; i < nloc; ++i) b[dofs[i]] += w * values[i];
      }
    }
  }
  return b;
}

NormPair discrete_norms(const FEFunction& fun) {
  const FESpace& space = *fun.space;
  const SparseMatrix mass = assemble_mass(space);
  const SparseMatrix stiffness = assemble_stiffness(space);
  Vector tmp(space.dof_count());
  mass.multiply(fun.coeffs, tmp);
  const double l2 = std::sqrt(std::max(0.0, dot(tmp, fun.coeffs)));
  stiffness.multiply(fun.coeffs, tmp);
  const double h1 = std::sqrt(std::max(0.0, dot(tmp, fun.coeffs)));
  return {l2, h1};
}

}  // namespace mplg
