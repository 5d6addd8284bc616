#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "mplg/fem.hpp"

using namespace mplg;

namespace {

// Test-only polynomial algebra in barycentric coordinates: monomial
// exponents -> coefficient. Integrates exactly with the closed-form simplex
// monomial formula, independent of the assembly quadrature.
struct BaryPoly {
  std::map<std::array<int, 4>, double> terms;

  static BaryPoly lambda(int i) {
    BaryPoly p;
    std::array<int, 4> e{};
    e[i] = 1;
    p.terms[e] = 1.0;
    return p;
  }
  static BaryPoly constant(double c) {
    BaryPoly p;
    p.terms[{0, 0, 0, 0}] = c;
    return p;
  }
  BaryPoly operator*(const BaryPoly& other) const {
    BaryPoly out;
    for (const auto& [ea, ca] : terms)
      for (const auto& [eb, cb] : other.terms) {
        std::array<int, 4> e = {ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2],
                                ea[3] + eb[3]};
        out.terms[e] += ca * cb;
      }
    return out;
  }
  BaryPoly operator+(const BaryPoly& other) const {
    BaryPoly out = *this;
    for (const auto& [e, c] : other.terms) out.terms[e] += c;
    return out;
  }
  BaryPoly scaled(double f) const {
    BaryPoly out = *this;
    for (auto& [e, c] : out.terms) c *= f;
    return out;
  }
  double integral(int dim, double cell_volume) const {
    // int over a cell = d! * |K| * reference integral
    double fact = 1.0;
    for (int i = 2; i <= dim; ++i) fact *= i;
    double sum = 0.0;
    for (const auto& [e, c] : terms)
      sum += c * simplex_monomial_integral(
                     dim, std::span<const int>(e.data(), dim + 1));
    return fact * cell_volume * sum;
  }
};

// P_k shape function as a BaryPoly, matching the implementation's local order
BaryPoly shape_poly(int dim, int degree, int local) {
  if (degree == 1) return BaryPoly::lambda(local);
  if (local < dim + 1) {
    // lambda (2 lambda - 1)
    BaryPoly l = BaryPoly::lambda(local);
    return l * l.scaled(2.0) + l.scaled(-1.0);
  }
  static const int edges2[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  static const int edges3[6][2] = {{0, 1}, {0, 2}, {0, 3},
                                   {1, 2}, {1, 3}, {2, 3}};
  const int e = local - (dim + 1);
  const int* pair = dim == 1   ? edges2[0]
                    : dim == 2 ? edges2[e]
                               : edges3[e];
  return (BaryPoly::lambda(pair[0]) * BaryPoly::lambda(pair[1])).scaled(4.0);
}

}  // namespace

TEST_CASE("interpolation reproduces nodal data") {
  const Mesh mesh = build_box_mesh(1, 2);
  const FESpace space(mesh, 1);
  const FEFunction ones =
      interpolate(space, [](const Point&) { return 1.0; });
  for (double c : ones.coeffs) CHECK(c == 1.0);
  const FEFunction linear =
      interpolate(space, [](const Point& x) { return x[0]; });
  CHECK(linear.coeffs[0] == doctest::Approx(-1.0));
  CHECK(linear.coeffs[1] == doctest::Approx(0.0));
  CHECK(linear.coeffs[2] == doctest::Approx(1.0));
}

TEST_CASE("pulse initial datum has a unit coefficient at the origin node") {
  const double nu = 0.01;
  const Mesh mesh = build_box_mesh(1, 2);
  const FESpace space(mesh, 1);
  const FEFunction phi0 = interpolate(space, [nu](const Point& x) {
    return std::exp(-(1.0 - std::cos(0.0 - x[0])) / nu);
  });
  CHECK(phi0.coeffs[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("interpolation reproduces polynomials of degree k") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  for (int dim = 1; dim <= 3; ++dim) {
    for (int degree = 1; degree <= 2; ++degree) {
      const Mesh mesh = build_box_mesh(dim, 3);
      const FESpace space(mesh, degree);
      auto poly = [degree](const Point& x) {
        double v = 0.7 + 0.3 * x[0] - 0.2 * x[1] + 0.15 * x[2];
        if (degree == 2)
          v += 0.4 * x[0] * x[0] - 0.1 * x[0] * x[1] + 0.2 * x[2] * x[2];
        return v;
      };
      const FEFunction fun = interpolate(space, poly);
      for (int trial = 0; trial < 100; ++trial) {
        Point x = origin();
        for (int i = 0; i < dim; ++i) x[i] = coord(rng);
        const double value = evaluate(fun, mesh.locate(x));
        CHECK(value == doctest::Approx(poly(x)).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("evaluate interpolates and extrapolates linearly in 1D") {
  const Mesh mesh = build_box_mesh(1, 2);
  const FESpace space(mesh, 1);
  FEFunction fun;
  fun.space = &space;
  fun.coeffs = {2.0, 4.0, 0.0};  // cell 0 has nodal values (2, 4)
  CellLocation loc;
  loc.cell_index = 0;
  loc.barycentric = {0.25, 0.75, 0.0, 0.0};
  loc.inside = true;
  CHECK(evaluate(fun, loc) == doctest::Approx(3.5));
  loc.barycentric = {1.1, -0.1, 0.0, 0.0};
  loc.inside = false;
  CHECK(evaluate(fun, loc) == doctest::Approx(1.8));
}

TEST_CASE("mass matrix: partition of unity and the 1D P1 stencil") {
  for (int dim = 1; dim <= 3; ++dim) {
    const Mesh mesh = build_box_mesh(dim, 2);
    const FESpace space(mesh, 1);
    const SparseMatrix mass = assemble_mass(space);
    CHECK(mass.is_symmetric());
    Vector ones(space.dof_count(), 1.0);
    const Vector weights = spmv(mass, ones);
    CHECK(dot(weights, ones) ==
          doctest::Approx(std::pow(2.0, dim)).epsilon(1e-12));
  }
  // mesh(1,2) has h=1: interior row (h/6, 2h/3, h/6)
  const Mesh mesh = build_box_mesh(1, 2);
  const FESpace space(mesh, 1);
  const SparseMatrix mass = assemble_mass(space);
  CHECK(mass.coeff(1, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
  CHECK(mass.coeff(1, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(mass.coeff(1, 2) == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
}

TEST_CASE("stiffness matrix: kernel of constants and the 1D P1 stencil") {
  const Mesh mesh = build_box_mesh(1, 2);
  const FESpace space(mesh, 1);
  const SparseMatrix stiffness = assemble_stiffness(space);
  CHECK(stiffness.coeff(1, 0) == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(stiffness.coeff(1, 1) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(stiffness.coeff(1, 2) == doctest::Approx(-1.0).epsilon(1e-13));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  for (int dim = 1; dim <= 3; ++dim) {
    const Mesh m = build_box_mesh(dim, 2);
    for (int degree = 1; degree <= 2; ++degree) {
      const FESpace s(m, degree);
      const SparseMatrix k = assemble_stiffness(s);
      CHECK(k.is_symmetric());
      Vector ones(s.dof_count(), 1.0);
      for (double v : spmv(k, ones))
        CHECK(std::abs(v) <= 1e-12);
      Vector x(s.dof_count());
      for (double& v : x) v = entry(rng);
      const Vector kx = spmv(k, x);
      CHECK(dot(kx, x) >= -1e-12);
    }
  }
}

TEST_CASE("element matrices match the exact barycentric-integral oracle") {
  for (int dim = 1; dim <= 3; ++dim) {
    const Mesh mesh = build_box_mesh(dim, 2);
    for (int degree = 1; degree <= 2; ++degree) {
      const FESpace space(mesh, degree);
      const SparseMatrix mass = assemble_mass(space);
      const int nloc = space.dofs_per_cell();
      // scatter exact local integrals into a reference global matrix
      std::map<std::pair<int, int>, double> exact;
      for (int cell = 0; cell < mesh.cell_count(); ++cell) {
        auto cd = space.cell_dofs(cell);
        for (int i = 0; i < nloc; ++i)
          for (int j = 0; j < nloc; ++j) {
            const double value =
                (shape_poly(dim, degree, i) * shape_poly(dim, degree, j))
                    .integral(dim, mesh.cell_volume());
            exact[{cd[i], cd[j]}] += value;
          }
      }
      for (const auto& [key, value] : exact)
        CHECK(mass.coeff(key.first, key.second) ==
              doctest::Approx(value).epsilon(1e-12));
    }
  }
}

TEST_CASE("load vector: forcing and boundary terms") {
  const Mesh mesh = build_box_mesh(2, 2);
  const FESpace space(mesh, 1);

  const Vector zero = assemble_load(space, nullptr, nullptr, 0.0);
  for (double v : zero) CHECK(v == 0.0);

  const Vector unit_f = assemble_load(
      space, [](const Point&, double) { return 1.0; }, nullptr, 0.0);
  double sum = 0.0;
  for (double v : unit_f) sum += v;
  CHECK(sum == doctest::Approx(4.0).epsilon(1e-13));

  const Vector unit_g = assemble_load(
      space, nullptr, [](const Point&, double) { return 1.0; }, 0.0);
  sum = 0.0;
  for (double v : unit_g) sum += v;
  CHECK(sum == doctest::Approx(8.0).epsilon(1e-13));
}

TEST_CASE("discrete norms of simple fields") {
  const Mesh mesh = build_box_mesh(1, 8);
  const FESpace space(mesh, 1);
  const FEFunction ones =
      interpolate(space, [](const Point&) { return 1.0; });
  const NormPair n1 = discrete_norms(ones);
  CHECK(n1.l2 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
  CHECK(n1.h1_semi == doctest::Approx(0.0).epsilon(1e-13));

  const FEFunction linear =
      interpolate(space, [](const Point& x) { return x[0]; });
  const NormPair n2 = discrete_norms(linear);
  CHECK(n2.l2 == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-13));

  FEFunction zero;
  zero.space = &space;
  zero.coeffs.assign(space.dof_count(), 0.0);
  const NormPair n3 = discrete_norms(zero);
  CHECK(n3.l2 == 0.0);
  CHECK(n3.h1_semi == 0.0);
}

TEST_CASE("mass matrix is positive definite (CG converges on random rhs)") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  const Mesh mesh = build_box_mesh(2, 4);
  for (int degree = 1; degree <= 2; ++degree) {
    const FESpace space(mesh, degree);
    const SparseMatrix mass = assemble_mass(space);
    for (int trial = 0; trial < 5; ++trial) {
      Vector b(space.dof_count());
      for (double& v : b) v = entry(rng);
      const CgResult result =
          cg_solve(mass, b, 1e-12, 10 * space.dof_count(),
                   Preconditioner::Jacobi);
      CHECK(result.relative_residual <= 1e-12);
    }
  }
}
