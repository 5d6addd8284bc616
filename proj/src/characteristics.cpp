#include "mplg/characteristics.hpp"

#include <algorithm>

namespace mplg {

void GammaDiagnostics::merge(const GammaDiagnostics& other) {
  evaluations += other.evaluations;
  out_of_range += other.out_of_range;
  min_value = std::min(min_value, other.min_value);
  max_value = std::max(max_value, other.max_value);
}

Point upwind_point(const VelocityField& u, double t, double dt,
                   const Point& x) {
  const Point v = u.value(x, t);
  return {x[0] - v[0] * dt, x[1] - v[1] * dt, x[2] - v[2] * dt};
}

double jacobian_det(int dim, const VelocityField& u, double t, double dt,
                    const Point& x, GammaDiagnostics* diagnostics) {
  const Mat g = u.gradient(x, t);
  double gamma;
  if (dim == 1) {
    gamma = 1.0 - dt * g[0][0];
  } else if (dim == 2) {
    const double a00 = 1.0 - dt * g[0][0];
    const double a01 = -dt * g[0][1];
    const double a10 = -dt * g[1][0];
    const double a11 = 1.0 - dt * g[1][1];
    gamma = a00 * a11 - a01 * a10;
  } else {
    double a[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        a[i][j] = (i == j ? 1.0 : 0.0) - dt * g[i][j];
    gamma = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
            a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
            a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  }
  if (diagnostics) diagnostics->record(gamma);
  return gamma;
}

ExpansionCheck expansion_check(int dim, const VelocityField& u, double t,
                               double dt, const Point& x) {
  ExpansionCheck check;
  check.direct = jacobian_det(dim, u, t, dt, x);

  const Mat g = u.gradient(x, t);
  double divergence = 0.0;
  for (int i = 0; i < dim; ++i) divergence += g[i][i];

  double delta1 = 0.0;
  double delta2 = 0.0;
  if (dim == 2) {
    delta1 = g[0][0] * g[1][1] - g[0][1] * g[1][0];
  } else if (dim == 3) {
    delta1 = g[0][0] * g[1][1] + g[1][1] * g[2][2] + g[2][2] * g[0][0] -
             g[0][1] * g[1][0] - g[1][2] * g[2][1] - g[2][0] * g[0][2];
    delta2 = -g[0][0] * g[1][1] * g[2][2] - g[0][1] * g[1][2] * g[2][0] -
             g[0][2] * g[1][0] * g[2][1] + g[0][0] * g[1][2] * g[2][1] +
             g[0][2] * g[1][1] * g[2][0] + g[0][1] * g[1][0] * g[2][2];
  }
  check.expanded =
      1.0 - dt * divergence + dt * dt * delta1 + dt * dt * dt * delta2;
  return check;
}

double composed_term(const FEFunction& fun, const VelocityField& u, double t,
                     int dt_multiplier, double dt, const Point& x,
                     GammaDiagnostics* diagnostics) {
  const double step = dt_multiplier * dt;
  const Point foot = upwind_point(u, t, step, x);
  const CellLocation loc = fun.space->mesh().locate(foot);
  const double gamma =
      jacobian_det(fun.space->mesh().dim(), u, t, step, x, diagnostics);
  return evaluate(fun, loc) * gamma;
}

}  // namespace mplg
