#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mplg/characteristics.hpp"
#include "mplg/fem.hpp"
#include "mplg/linalg.hpp"
#include "mplg/mesh.hpp"

namespace mplg {

/// Convection-diffusion problem data: d phi/dt + div(u phi) - nu lap phi = f
/// with the natural flux condition nu dphi/dn - phi u.n = g and initial data
/// phi0. exact/exact_dt are optional references for the error metrics.
struct ProblemData {
  Domain domain;
  double nu = 1e-2;
  double T = 0.5;
  VelocityField velocity;
  std::function<double(const Point&, double)> source;         // f, may be empty
  std::function<double(const Point&, double)> boundary_flux;  // g, may be empty
  std::function<double(const Point&)> initial;
  std::function<double(const Point&, double)> exact;     // optional
  std::function<double(const Point&, double)> exact_dt;  // optional
};

enum class SchemeVariant {
  MassPreservingTwoStep,   // Jacobian-weighted two-step composition
  RuiTabataFirstOrder,     // first-order form at every step
  EwingRussellTwoStep,     // two-step composition without the Jacobians
};

struct SchemeConfig {
  SchemeVariant variant = SchemeVariant::MassPreservingTwoStep;
  double dt = 0.1;
  double cg_tol = 1e-12;
  int cg_max_iter = 0;  // 0 -> 10 * dof_count
  bool record_snapshots = true;
};

struct RunDiagnostics {
  GammaDiagnostics gamma;
  bool hyp_dt_warning = false;  // dt |u|_{W^{1,inf}} > 1/8 at initialize time
  double dt_w1inf = 0.0;
  long long total_cg_iterations = 0;
  int max_cg_iterations = 0;
  double max_cg_residual = 0.0;
};

struct Trajectory {
  std::vector<double> times;                  // t^0 .. t^{N_T}
  std::vector<Vector> snapshots;              // coefficient vectors, if recorded
  RunDiagnostics diagnostics;
  int steps = 0;                              // N_T
  double dt = 0.0;
};

/// Time stepper for the three scheme variants. The system matrices
/// (1/dt) M + nu K and (3/(2dt)) M + nu K are assembled once per run; each
/// step assembles the composed upwind right-hand side with the fixed cell
/// rule and solves by Jacobi-preconditioned CG warm-started from the
/// previous solution. Not shareable across threads while stepping.
class Stepper {
 public:
  Stepper(const ProblemData& problem, const FESpace& space,
          const SchemeConfig& config);

  int total_steps() const { return total_steps_; }
  int current_step() const { return step_; }
  double time() const { return step_ * config_.dt; }

  const Vector& solution() const { return phi_prev_; }
  const Vector* previous_solution() const {
    return has_prev2_ ? &phi_prev2_ : nullptr;
  }

  const SparseMatrix& mass_matrix() const { return mass_; }
  const SparseMatrix& stiffness_matrix() const { return stiffness_; }
  const RunDiagnostics& diagnostics() const { return diagnostics_; }

  /// Advance one step; returns the new coefficient vector.
  const Vector& step();

  using Observer =
      std::function<void(int step, double time, const Vector& coeffs)>;
  /// Run steps 1..N_T. The observer (if any) sees every accepted step;
  /// snapshots are recorded when config.record_snapshots is set.
  Trajectory run(const Observer& observer = {});

 private:
  const ProblemData* problem_;
  const FESpace* space_;
  SchemeConfig config_;
  int total_steps_;
  int step_ = 0;
  bool has_prev2_ = false;
  Vector phi_prev_;    // phi^{n-1} before step(), phi^n after
  Vector phi_prev2_;   // phi^{n-2}
  SparseMatrix mass_;
  SparseMatrix stiffness_;
  SparseMatrix system_first_;     // (1/dt) M + nu K
  SparseMatrix system_two_step_;  // (3/(2dt)) M + nu K
  RunDiagnostics diagnostics_;

  // quadrature data shared by every step
  QuadratureRule rule_;
  std::vector<std::array<double, 10>> shape_table_;
  double cell_jacobian_ = 0.0;

  void assemble_upwind_rhs(const Vector& coeffs, int dt_multiplier, double t,
                           bool with_jacobian, Vector& out);
  Vector solve(const SparseMatrix& system, const Vector& rhs);
};

/// Number of steps floor(T/dt) with a guard against representation noise.
int step_count(double T, double dt);

Trajectory run_scheme(const ProblemData& problem, const FESpace& space,
                      const SchemeConfig& config,
                      const Stepper::Observer& observer = {});

}  // namespace mplg
