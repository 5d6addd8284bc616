#pragma once

#include <array>
#include <functional>
#include <vector>

#include "mplg/mesh.hpp"
#include "mplg/types.hpp"

namespace mplg {

/// Fixed quadrature rule on the reference simplex. Points are stored in
/// barycentric coordinates; weights sum to the reference simplex measure
/// 1/d!. A rule integrates every polynomial of total degree <= degree
/// exactly (validated by the monomial property tests).
struct QuadratureRule {
  int dim = 0;
  int degree = 0;
  std::vector<std::array<double, 4>> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(weights.size()); }
};

/// Cell rules of the experiments: degree 9 (5 points) for d=1, degree 5 for
/// d=2 (7 points) and d=3 (15 points).
QuadratureRule simplex_rule(int dim);

/// Boundary-facet rule: a rule on the (d-1)-simplex of degree >= 5. The
/// d=1 facet is a point (single unit-weight node).
QuadratureRule facet_rule(int dim);

double integrate_cell(const QuadratureRule& rule, const Mesh& mesh, int cell,
                      const std::function<double(const Point&)>& integrand);

/// Integral over the whole domain with the given cell rule.
double integrate_domain(const QuadratureRule& rule, const Mesh& mesh,
                        const std::function<double(const Point&)>& integrand);

/// Integral over the boundary with the matching facet rule.
double integrate_boundary(const QuadratureRule& rule, const Mesh& mesh,
                          const std::function<double(const Point&)>& integrand);

/// Exact integral of the barycentric monomial prod lambda_i^alpha_i over the
/// reference d-simplex: (prod alpha_i!) * d! / (|alpha| + d)! * (1/d!).
double simplex_monomial_integral(int dim, std::span<const int> exponents);

}  // namespace mplg
