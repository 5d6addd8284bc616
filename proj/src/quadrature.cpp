#include "mplg/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace mplg {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// 5-point Gauss-Legendre on [0,1], exact through degree 9.
QuadratureRule gauss5_interval() {
  QuadratureRule rule;
  rule.dim = 1;
  rule.degree = 9;
  const double s70 = std::sqrt(70.0);
  const double t1 = std::sqrt(245.0 - 14.0 * s70) / 21.0;
  const double t2 = std::sqrt(245.0 + 14.0 * s70) / 21.0;
  const double w0 = 128.0 / 225.0;
  const double w1 = (322.0 + 13.0 * s70) / 900.0;
  const double w2 = (322.0 - 13.0 * s70) / 900.0;
  const double nodes[5] = {0.5, 0.5 - t1 / 2.0, 0.5 + t1 / 2.0,
                           0.5 - t2 / 2.0, 0.5 + t2 / 2.0};
  const double weights[5] = {w0, w1, w1, w2, w2};
  for (int q = 0; q < 5; ++q) {
    rule.points.push_back({1.0 - nodes[q], nodes[q], 0.0, 0.0});
    rule.weights.push_back(weights[q] / 2.0);
  }
  return rule;
}

// 3-point Gauss-Legendre on [0,1], exact through degree 5 (facet rule).
QuadratureRule gauss3_interval() {
  QuadratureRule rule;
  rule.dim = 1;
  rule.degree = 5;
  const double t = std::sqrt(3.0 / 5.0) / 2.0;
  const double nodes[3] = {0.5, 0.5 - t, 0.5 + t};
  const double weights[3] = {8.0 / 18.0, 5.0 / 18.0, 5.0 / 18.0};
  for (int q = 0; q < 3; ++q) {
    rule.points.push_back({1.0 - nodes[q], nodes[q], 0.0, 0.0});
    rule.weights.push_back(weights[q]);
  }
  return rule;
}

// Hammer-Marlowe-Stroud 7-point degree-5 triangle rule.
QuadratureRule triangle7() {
  QuadratureRule rule;
  rule.dim = 2;
  rule.degree = 5;
  const double s15 = std::sqrt(15.0);
  const double a1 = (6.0 + s15) / 21.0;
  const double a2 = (6.0 - s15) / 21.0;
  const double w0 = 9.0 / 40.0;
  const double w1 = (155.0 + s15) / 1200.0;
  const double w2 = (155.0 - s15) / 1200.0;
  auto push_orbit = [&rule](double a, double w) {
    const double b = 1.0 - 2.0 * a;
    rule.points.push_back({b, a, a, 0.0});
    rule.points.push_back({a, b, a, 0.0});
    rule.points.push_back({a, a, b, 0.0});
    for (int i = 0; i < 3; ++i) rule.weights.push_back(w / 2.0);
  };
  rule.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0});
  rule.weights.push_back(w0 / 2.0);
  push_orbit(a1, w1);
  push_orbit(a2, w2);
  return rule;
}

// 15-point degree-5 tetrahedron rule (Stroud / Keast tabulation).
QuadratureRule tetrahedron15() {
  QuadratureRule rule;
  rule.dim = 3;
  rule.degree = 5;
  const double s15 = std::sqrt(15.0);
  const double a1 = (7.0 - s15) / 34.0;
  const double a2 = (7.0 + s15) / 34.0;
  const double w0 = 16.0 / 135.0;
  const double w1 = (2665.0 + 14.0 * s15) / 37800.0;
  const double w2 = (2665.0 - 14.0 * s15) / 37800.0;
  const double s = (10.0 - 2.0 * s15) / 40.0;
  const double t = (10.0 + 2.0 * s15) / 40.0;
  const double ws = 10.0 / 189.0;
  auto push_vertex_orbit = [&rule](double a, double w) {
    const double b = 1.0 - 3.0 * a;
    rule.points.push_back({b, a, a, a});
    rule.points.push_back({a, b, a, a});
    rule.points.push_back({a, a, b, a});
    rule.points.push_back({a, a, a, b});
    for (int i = 0; i < 4; ++i) rule.weights.push_back(w / 6.0);
  };
  rule.points.push_back({0.25, 0.25, 0.25, 0.25});
  rule.weights.push_back(w0 / 6.0);
  push_vertex_orbit(a1, w1);
  push_vertex_orbit(a2, w2);
  const int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  for (const auto& pair : pairs) {
    std::array<double, 4> p = {t, t, t, t};
    p[pair[0]] = s;
    p[pair[1]] = s;
    rule.points.push_back(p);
    rule.weights.push_back(ws / 6.0);
  }
  return rule;
}

QuadratureRule point_rule() {
  QuadratureRule rule;
  rule.dim = 0;
  rule.degree = 5;  // a point rule is exact for any polynomial
  rule.points.push_back({1.0, 0.0, 0.0, 0.0});
  rule.weights.push_back(1.0);
  return rule;
}

double facet_measure(const Mesh& mesh, const BoundaryFacet& facet) {
  switch (mesh.dim()) {
    case 1:
      return 1.0;
    case 2: {
      const Point& a = mesh.vertex(facet.vertices[0]);
      const Point& b = mesh.vertex(facet.vertices[1]);
      return std::hypot(b[0] - a[0], b[1] - a[1]);
    }
    default: {
      const Point& a = mesh.vertex(facet.vertices[0]);
      const Point& b = mesh.vertex(facet.vertices[1]);
      const Point& c = mesh.vertex(facet.vertices[2]);
      const double u[3] = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
      const double v[3] = {c[0] - a[0], c[1] - a[1], c[2] - a[2]};
      const double cx = u[1] * v[2] - u[2] * v[1];
      const double cy = u[2] * v[0] - u[0] * v[2];
      const double cz = u[0] * v[1] - u[1] * v[0];
      return 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
    }
  }
}

}  // namespace

QuadratureRule simplex_rule(int dim) {
  switch (dim) {
    case 1: return gauss5_interval();
    case 2: return triangle7();
    case 3: return tetrahedron15();
    default: throw std::invalid_argument("simplex_rule: dim must be 1, 2 or 3");
  }
}

QuadratureRule facet_rule(int dim) {
  switch (dim) {
    case 1: return point_rule();
    case 2: return gauss3_interval();
    case 3: return triangle7();
    default: throw std::invalid_argument("facet_rule: dim must be 1, 2 or 3");
  }
}

double integrate_cell(const QuadratureRule& rule, const Mesh& mesh, int cell,
                      const std::function<double(const Point&)>& integrand) {
  const int d = mesh.dim();
  const double jac = factorial(d) * mesh.cell_volume();
  auto verts = mesh.cell_vertices(cell);
  double sum = 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    Point x = origin();
    for (int v = 0; v < d + 1; ++v) {
      const Point& p = mesh.vertex(verts[v]);
      const double lambda = rule.points[q][v];
      for (int i = 0; i < d; ++i) x[i] += lambda * p[i];
    }
    sum += rule.weights[q] * integrand(x);
  }
  return jac * sum;
}

double integrate_domain(const QuadratureRule& rule, const Mesh& mesh,
                        const std::function<double(const Point&)>& integrand) {
  double sum = 0.0;
  for (int cell = 0; cell < mesh.cell_count(); ++cell)
    sum += integrate_cell(rule, mesh, cell, integrand);
  return sum;
}

double integrate_boundary(const QuadratureRule& rule, const Mesh& mesh,
                          const std::function<double(const Point&)>& integrand) {
  const int d = mesh.dim();
  const double fac = factorial(d - 1);
  double sum = 0.0;
  for (const auto& facet : mesh.boundary_facets()) {
    const double jac = fac * facet_measure(mesh, facet);
    for (int q = 0; q < rule.size(); ++q) {
      Point x = origin();
      for (int v = 0; v < facet.vertex_count; ++v) {
        const Point& p = mesh.vertex(facet.vertices[v]);
        const double lambda = rule.points[q][v];
        for (int i = 0; i < d; ++i) x[i] += lambda * p[i];
      }
      sum += jac * rule.weights[q] * integrand(x);
    }
  }
  return sum;
}

double simplex_monomial_integral(int dim, std::span<const int> exponents) {
  int total = 0;
  double numerator = 1.0;
  for (int e : exponents) {
    total += e;
    numerator *= factorial(e);
  }
  return numerator / factorial(total + dim);
}

}  // namespace mplg
