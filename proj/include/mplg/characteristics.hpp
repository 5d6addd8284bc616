#pragma once

#include <functional>
#include <limits>
#include <optional>

#include "mplg/fem.hpp"
#include "mplg/types.hpp"

namespace mplg {

/// Analytic velocity with analytic Jacobian matrix. gradient[i][j] must be
/// du_i/dx_j; the determinant weighting of the scheme depends on it directly,
/// so no finite-difference fallback exists in the stepping path.
struct VelocityField {
  std::function<Point(const Point&, double)> value;
  std::function<Mat(const Point&, double)> gradient;
  std::optional<double> w1inf_seminorm;  // sup-norm of the gradient, diagnostics
};

/// Running record of Jacobian evaluations; values outside [1/2, 3/2] mark a
/// violated time-step hypothesis and are reported, never raised as errors.
struct GammaDiagnostics {
  long long evaluations = 0;
  long long out_of_range = 0;
  double min_value = std::numeric_limits<double>::infinity();
  double max_value = -std::numeric_limits<double>::infinity();

  void record(double gamma) {
    ++evaluations;
    if (gamma < 0.5 || gamma > 1.5) ++out_of_range;
    if (gamma < min_value) min_value = gamma;
    if (gamma > max_value) max_value = gamma;
  }
  void merge(const GammaDiagnostics& other);
};

/// Upwind point x - u(x,t) dt.
Point upwind_point(const VelocityField& u, double t, double dt,
                   const Point& x);

/// det(I - dt grad u(x,t)).
double jacobian_det(int dim, const VelocityField& u, double t, double dt,
                    const Point& x, GammaDiagnostics* diagnostics = nullptr);

struct ExpansionCheck {
  double direct = 0.0;
  double expanded = 0.0;
};

/// Direct determinant against the closed-form expansion
/// 1 - dt div(u) + dt^2 delta1 + dt^3 delta2 (an exact polynomial identity).
ExpansionCheck expansion_check(int dim, const VelocityField& u, double t,
                               double dt, const Point& x);

/// (phi_h o X)(x) * gamma(x) for the step's upwind map; dt_multiplier 1
/// selects X_1^n, 2 selects the doubled-step map. Exterior feet evaluate by
/// polynomial extension of the clamped cell.
double composed_term(const FEFunction& fun, const VelocityField& u, double t,
                     int dt_multiplier, double dt, const Point& x,
                     GammaDiagnostics* diagnostics = nullptr);

}  // namespace mplg
