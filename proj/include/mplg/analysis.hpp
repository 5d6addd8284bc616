#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "mplg/fem.hpp"
#include "mplg/scheme.hpp"

namespace mplg {

/// Relative errors E_Y = ||phi_h - I_h phi||_Y / ||I_h phi||_Y against the
/// interpolated exact solution, for Y in { linf(L2), l2(H10), linf(H10) },
/// over steps n = 1..N_T. e_h1_l2 is the discrete H1(L2) error of the
/// backward difference against the exact time derivative, present when the
/// problem supplies one.
struct ErrorReport {
  double e_linf_l2 = 0.0;
  double e_l2_h10 = 0.0;
  double e_linf_h10 = 0.0;
  std::optional<double> e_h1_l2;
};

/// Discrete mass per step and the three relative mass-error metrics.
/// m_h[n] is the integral of phi_h^n for n <= 1 and of
/// (3/2) phi_h^n - (1/2) phi_h^{n-1} for n >= 2.
/// e_mass compares the final mass against the interpolated exact mass,
/// e_mass_prime against the initial mass, and e_mass_double_prime is the
/// dt-weighted sum formula with the absolute values inside the sums.
/// e_mass and e_mass_double_prime are NaN when no exact solution exists.
struct MassReport {
  std::vector<double> m_h;
  double e_mass = 0.0;
  double e_mass_prime = 0.0;
  double e_mass_double_prime = 0.0;
};

struct ConvergenceRow {
  int division = 0;
  double dt = 0.0;
  double grid_h = 0.0;
  int steps = 0;
  int dofs = 0;
  ErrorReport errors;
  std::array<std::optional<double>, 3> eocs;  // per error column
  MassReport mass;
  RunDiagnostics diagnostics;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
};

ErrorReport error_norms(const Trajectory& traj, const ProblemData& problem,
                        const FESpace& space);

/// Backward difference of a solution sequence: first-order quotient at n=1,
/// the three-point second-order quotient for n >= 2.
FEFunction bdf_apply(std::span<const FEFunction> sequence, int n, double dt);

MassReport mass_metrics(const Trajectory& traj, const ProblemData& problem,
                        const FESpace& space);

/// m_h[n] - m_h[0] - dt * sum_{i<=n} (int f^i + int_Gamma g^i); isolates the
/// conservation defect of the composed-term quadrature.
std::vector<double> mass_balance_residual(const Trajectory& traj,
                                          const ProblemData& problem,
                                          const FESpace& space);

/// Fill the EOC columns from consecutive rows: log(E2/E1)/log(dt2/dt1), or
/// the mesh-size ratio when dt is constant across the pair. Zero or
/// non-finite errors leave the entry unset.
ConvergenceTable& compute_eocs(ConvergenceTable& table);

/// Analytic space-time scalar field with the derivatives the truncation
/// probe needs.
struct SpaceTimeField {
  std::function<double(const Point&, double)> value;
  std::function<Point(const Point&, double)> gradient;
  std::function<double(const Point&, double)> time_derivative;
};

struct TruncationProbe {
  std::vector<std::pair<double, double>> samples;  // (dt, L2 residual)
  double slope = 0.0;                              // least-squares fit
};

/// L2(Omega) residual of the discrete material-derivative operator applied
/// to the exact field against d phi/dt + div(u phi) at a fixed time, per dt.
/// order selects the one-step or the two-step operator.
TruncationProbe truncation_probe(int order, const VelocityField& u,
                                 const SpaceTimeField& field,
                                 std::span<const double> dt_list,
                                 const Mesh& mesh, double t_star);

struct GronwallReport {
  long long trials = 0;
  long long violations = 0;
  long long root_property_violations = 0;
};

/// Sampled verification of the two-step discrete Gronwall inequality: build
/// nonnegative sequences satisfying the hypothesis with equality, then test
/// the conclusion for n <= 200 together with the five root properties of the
/// characteristic quadratic.
GronwallReport gronwall_check(long long trials, unsigned long long seed);

}  // namespace mplg
